#pragma once

#include <cmath>
#include <vector>

#include "spingeo/fields.hpp"
#include "spingeo/rng.hpp"

namespace spingeo {

// Real trigonometric polynomials with modes |k_a| <= kmax, built as explicit
// mode sums so that the same (seed, grid) pair reproduces the same field in
// any implementation of the generator.

namespace detail {

// nonzero lattice modes with first nonzero component positive
inline std::vector<std::vector<int>> mode_list(int m, int kmax) {
  std::vector<std::vector<int>> modes;
  std::vector<int> k(m, -kmax);
  while (true) {
    bool nonzero = false, positive = false;
    for (int a = 0; a < m; ++a) {
      if (k[a] != 0) {
        nonzero = true;
        positive = k[a] > 0;
        break;
      }
    }
    if (nonzero && positive) modes.push_back(k);
    int a = m - 1;
    while (a >= 0 && ++k[a] > kmax) k[a--] = -kmax;
    if (a < 0) break;
  }
  return modes;
}

}  // namespace detail

inline ScalarField random_bandlimited_scalar(const TorusGrid& grid, int kmax,
                                             CounterRng& rng, double amp = 1.0) {
  auto modes = detail::mode_list(grid.dim(), kmax);
  ScalarField f(grid);
  std::vector<double> x;
  std::vector<std::pair<double, double>> coef(modes.size());
  for (auto& c : coef) c = {rng.symmetric(), rng.symmetric()};
  double scale = amp / std::sqrt(static_cast<double>(modes.size()));
  for (long p = 0; p < grid.total(); ++p) {
    grid.coords(p, x);
    double val = 0.0;
    for (size_t s = 0; s < modes.size(); ++s) {
      double ph = 0.0;
      for (int a = 0; a < grid.dim(); ++a) ph += modes[s][a] * x[a];
      ph *= 2.0 * M_PI;
      val += coef[s].first * std::cos(ph) + coef[s].second * std::sin(ph);
    }
    f.at(p) = scale * val;
  }
  return f;
}

inline SymTensorField random_bandlimited_symtensor(const TorusGrid& grid, int m,
                                                   int kmax, CounterRng& rng,
                                                   double amp = 1.0) {
  SymTensorField h(grid, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      CounterRng sub = rng.split(a * 16 + b);
      ScalarField f = random_bandlimited_scalar(grid, kmax, sub, amp);
      for (long p = 0; p < grid.total(); ++p) {
        h.at(p, a, b) = f.at(p);
        h.at(p, b, a) = f.at(p);
      }
    }
  return h;
}

inline VectorField random_bandlimited_vector(const TorusGrid& grid, int m,
                                             int kmax, CounterRng& rng,
                                             double amp = 1.0) {
  VectorField X(grid, m);
  for (int a = 0; a < m; ++a) {
    CounterRng sub = rng.split(100 + a);
    ScalarField f = random_bandlimited_scalar(grid, kmax, sub, amp);
    for (long p = 0; p < grid.total(); ++p) X.at(p, a) = f.at(p);
  }
  return X;
}

inline SpinorField random_bandlimited_spinor(const TorusGrid& grid,
                                             std::shared_ptr<const GammaRep> rep,
                                             int kmax, CounterRng& rng,
                                             double amp = 1.0) {
  SpinorField phi(grid, rep);
  for (int k = 0; k < rep->d; ++k) {
    CounterRng re = rng.split(200 + 2 * k);
    CounterRng im = rng.split(201 + 2 * k);
    ScalarField fr = random_bandlimited_scalar(grid, kmax, re, amp);
    ScalarField fi = random_bandlimited_scalar(grid, kmax, im, amp);
    for (long p = 0; p < grid.total(); ++p)
      phi.at(p, k) = cplx(fr.at(p), fi.at(p));
  }
  return phi;
}

// e^{2u} delta for a given conformal factor
inline MetricField conformal_metric(const ScalarField& u, int m) {
  MetricField G(u.grid, m);
  for (long p = 0; p < u.grid.total(); ++p) {
    double s = std::exp(2.0 * u.at(p));
    for (int a = 0; a < m; ++a) G.at(p, a, a) = s;
  }
  G.flat = false;
  return G;
}

// delta + perturbation, checked positive definite
inline MetricField perturbed_metric(const TorusGrid& grid, int m, int kmax,
                                    CounterRng& rng, double amp) {
  SymTensorField h = random_bandlimited_symtensor(grid, m, kmax, rng, amp);
  MetricField G(grid, m);
  for (long p = 0; p < grid.total(); ++p) {
    RMat v = RMat::Identity(m, m) + h.mat(p);
    G.set(p, v);
  }
  G.flat = false;
  G.validate();
  return G;
}

}  // namespace spingeo
