#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace spingeo {

// Chebyshev interpolant on [a,b] through values at the Chebyshev-Gauss-
// Lobatto nodes x_j = a + (b-a)(cos(pi j / N) + 1)/2, j = 0..N.
struct ChebSeries {
  double a = -1.0, b = 1.0;
  std::vector<double> coef;  // c_k of sum'' c_k T_k(t)

  static std::vector<double> nodes(double a, double b, int n) {
    std::vector<double> x(n + 1);
    for (int j = 0; j <= n; ++j)
      x[j] = a + (b - a) * (std::cos(M_PI * j / n) + 1.0) / 2.0;
    return x;
  }

  static ChebSeries fit(double a, double b, const std::vector<double>& values) {
    int n = static_cast<int>(values.size()) - 1;
    if (n < 1) throw std::invalid_argument("ChebSeries: need at least 2 nodes");
    ChebSeries s;
    s.a = a;
    s.b = b;
    s.coef.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      double sum = 0.5 * (values[0] + (k % 2 == 0 ? 1.0 : -1.0) * values[n]);
      for (int j = 1; j < n; ++j)
        sum += values[j] * std::cos(M_PI * j * k / n);
      s.coef[k] = 2.0 * sum / n;
    }
    s.coef[0] *= 0.5;
    s.coef[n] *= 0.5;
    return s;
  }

  double eval(double x) const {
    double t = 2.0 * (x - a) / (b - a) - 1.0;
    t = std::min(1.0, std::max(-1.0, t));
    // Clenshaw
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(coef.size()) - 1; k >= 1; --k) {
      double tmp = 2.0 * t * b1 - b2 + coef[k];
      b2 = b1;
      b1 = tmp;
    }
    return t * b1 - b2 + coef[0];
  }

  ChebSeries derivative() const {
    int n = static_cast<int>(coef.size()) - 1;
    ChebSeries d;
    d.a = a;
    d.b = b;
    d.coef.assign(n + 1, 0.0);
    std::vector<double> c(coef);
    std::vector<double> dc(n + 2, 0.0);
    for (int k = n; k >= 1; --k)
      dc[k - 1] = dc[k + 1] + 2.0 * k * c[k];
    dc[0] *= 0.5;
    double scale = 2.0 / (b - a);
    for (int k = 0; k <= n; ++k) d.coef[k] = scale * dc[k];
    return d;
  }

  // integral of the interpolant over [a,x] evaluated exactly
  ChebSeries antiderivative() const {
    int n = static_cast<int>(coef.size()) - 1;
    ChebSeries s;
    s.a = a;
    s.b = b;
    s.coef.assign(n + 2, 0.0);
    // int T_0 = T_1, int T_1 = T_2/4, int T_k = T_{k+1}/(2(k+1)) - T_{k-1}/(2(k-1))
    double scale = (b - a) / 2.0;
    for (int k = 1; k <= n; ++k) {
      s.coef[k + 1] += scale * coef[k] / (2.0 * (k + 1));
      if (k >= 2) s.coef[k - 1] -= scale * coef[k] / (2.0 * (k - 1));
    }
    s.coef[1] += scale * coef[0];
    // fix constant so that value at a (t=-1) is 0
    double at_a = 0.0;
    double tm = -1.0;
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(s.coef.size()) - 1; k >= 1; --k) {
      double tmp = 2.0 * tm * b1 - b2 + s.coef[k];
      b2 = b1;
      b1 = tmp;
    }
    at_a = tm * b1 - b2 + s.coef[0];
    s.coef[0] -= at_a;
    return s;
  }
};

// Trigonometric interpolant through values at s_j = j L / n on [0, L).
struct FourierSeries {
  double L = 1.0;
  std::vector<std::complex<double>> coef;  // FFT-ordered

  static std::vector<double> nodes(double L, int n) {
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = L * j / n;
    return x;
  }

  static FourierSeries fit(double L, const std::vector<double>& values) {
    FourierSeries s;
    s.L = L;
    int n = static_cast<int>(values.size());
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(values.begin(), values.end()), out(n);
    fft.fwd(out, in);
    for (auto& c : out) c /= static_cast<double>(n);
    s.coef = out;
    return s;
  }

  double eval(double x) const {
    int n = static_cast<int>(coef.size());
    std::complex<double> sum(0, 0);
    for (int i = 0; i < n; ++i) {
      int k = i < n / 2 ? i : i - n;
      if (i == n / 2) {
        // unpaired Nyquist mode: cosine interpolation
        sum += coef[i] * std::cos(2.0 * M_PI * (n / 2) * x / L);
        continue;
      }
      sum += coef[i] * std::exp(std::complex<double>(0, 2.0 * M_PI * k * x / L));
    }
    return sum.real();
  }

  double eval_derivative(double x) const {
    int n = static_cast<int>(coef.size());
    std::complex<double> sum(0, 0);
    for (int i = 0; i < n; ++i) {
      int k = i < n / 2 ? i : i - n;
      if (i == n / 2) {
        sum += -coef[i] * (2.0 * M_PI * (n / 2) / L) *
               std::sin(2.0 * M_PI * (n / 2) * x / L);
        continue;
      }
      std::complex<double> ik(0, 2.0 * M_PI * k / L);
      sum += coef[i] * ik * std::exp(std::complex<double>(0, 2.0 * M_PI * k * x / L));
    }
    return sum.real();
  }
};

// integration weights for the Chebyshev-Gauss-Lobatto nodes (integrate the
// interpolant exactly)
inline std::vector<double> clenshaw_curtis_weights(double a, double b, int n) {
  std::vector<double> w(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    std::vector<double> e(n + 1, 0.0);
    e[j] = 1.0;
    ChebSeries s = ChebSeries::fit(a, b, e);
    double integral = 0.0;
    for (size_t k = 0; k < s.coef.size(); k += 2) {
      // int_{-1}^{1} T_k dt = 2/(1-k^2) for even k
      integral += s.coef[k] * 2.0 / (1.0 - static_cast<double>(k) * k);
    }
    w[j] = integral * (b - a) / 2.0;
  }
  return w;
}

}  // namespace spingeo
