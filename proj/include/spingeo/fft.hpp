#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "spingeo/grid.hpp"

namespace spingeo {

using cplx = std::complex<double>;

namespace detail {

// Applies a 1D transform along one grid axis of a comp-strided array
// (layout data[p * ncomp + c]); `line` is gathered, transformed, scattered.
template <typename Fn>
void for_each_line(const TorusGrid& g, std::vector<cplx>& data, int ncomp,
                   int axis, Fn&& fn) {
  const int n = g.sizes[axis];
  const long stride = g.stride(axis) * ncomp;
  const long total = g.total() * ncomp;
  const long block = stride * n;  // span of one axis sweep
  std::vector<cplx> line(n);
  for (long base = 0; base < total; base += block) {
    for (long off = 0; off < stride; ++off) {
      for (int i = 0; i < n; ++i) line[i] = data[base + off + i * stride];
      fn(line);
      for (int i = 0; i < n; ++i) data[base + off + i * stride] = line[i];
    }
  }
}

}  // namespace detail

inline void fft_axis(const TorusGrid& g, std::vector<cplx>& data, int ncomp,
                     int axis, bool inverse) {
  Eigen::FFT<double> fft;
  const int n = g.sizes[axis];
  std::vector<cplx> out(n);
  detail::for_each_line(g, data, ncomp, axis, [&](std::vector<cplx>& line) {
    if (inverse)
      fft.inv(out, line);
    else
      fft.fwd(out, line);
    line = out;
  });
}

// Derivative of the trigonometric interpolant along one axis. A nonzero
// twist_angle alpha means the represented field is quasi-periodic across
// that axis, f(x + 1) = e^{i alpha} f(x), while the stored samples are the
// field values; the samples are untwisted, differentiated with shifted
// wavenumbers, and retwisted. The Nyquist mode is dropped.
inline std::vector<cplx> spectral_derivative(const TorusGrid& g,
                                             const std::vector<cplx>& data,
                                             int ncomp, int axis,
                                             double twist_angle = 0.0) {
  const double tau = 2.0 * M_PI;
  std::vector<cplx> work = data;
  const int n = g.sizes[axis];
  const long stridec = g.stride(axis) * ncomp;

  if (twist_angle != 0.0) {
    for (long p = 0; p < g.total(); ++p) {
      double x = g.coord(p, axis);
      cplx ph = std::exp(cplx(0.0, -twist_angle * x));
      for (int c = 0; c < ncomp; ++c) work[p * ncomp + c] *= ph;
    }
  }

  fft_axis(g, work, ncomp, axis, false);
  const long total = g.total() * ncomp;
  const long block = stridec * n;
  for (long base = 0; base < total; base += block) {
    for (int i = 0; i < n; ++i) {
      cplx mult = (i == n / 2)
                      ? cplx(0.0, 0.0)
                      : cplx(0.0, tau * TorusGrid::freq(i, n) + twist_angle);
      for (long off = 0; off < stridec; ++off)
        work[base + off + i * stridec] *= mult;
    }
  }
  fft_axis(g, work, ncomp, axis, true);

  if (twist_angle != 0.0) {
    for (long p = 0; p < g.total(); ++p) {
      double x = g.coord(p, axis);
      cplx ph = std::exp(cplx(0.0, twist_angle * x));
      for (int c = 0; c < ncomp; ++c) work[p * ncomp + c] *= ph;
    }
  }
  return work;
}

inline std::vector<double> spectral_derivative_real(
    const TorusGrid& g, const std::vector<double>& data, int ncomp, int axis) {
  std::vector<cplx> work(data.begin(), data.end());
  work = spectral_derivative(g, work, ncomp, axis);
  std::vector<double> out(data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = work[i].real();
  return out;
}

}  // namespace spingeo
