#pragma once

#include <functional>
#include <stdexcept>

#include "spingeo/clifford.hpp"
#include "spingeo/fields.hpp"
#include "spingeo/interp1d.hpp"

namespace spingeo {

// Family of constant-coefficient (flat torus) metrics over an s-interval,
// with evaluators for G(s) and its s-derivative. Closed paths may carry a
// lattice gluing map zeta with G(s1) = zeta^T G(s0) zeta.
struct MetricPath {
  int m = 0;
  double s0 = 0.0, s1 = 1.0;
  bool closed = false;
  RMat zeta;  // empty for plain paths
  std::function<RMat(double)> G;
  std::function<RMat(double)> Gdot;

  bool has_zeta() const { return zeta.size() != 0; }
};

inline MetricPath constant_path(const RMat& G0, double s0, double s1) {
  MetricPath p;
  p.m = static_cast<int>(G0.rows());
  p.s0 = s0;
  p.s1 = s1;
  p.closed = true;
  p.G = [G0](double) { return G0; };
  p.Gdot = [n = p.m](double) { return RMat::Zero(n, n); };
  return p;
}

inline MetricPath exponential_path(const RMat& G0, double s0, double s1) {
  MetricPath p;
  p.m = static_cast<int>(G0.rows());
  p.s0 = s0;
  p.s1 = s1;
  p.G = [G0](double s) { return RMat(std::exp(2.0 * s) * G0); };
  p.Gdot = [G0](double s) { return RMat(2.0 * std::exp(2.0 * s) * G0); };
  return p;
}

inline MetricPath functional_path(int m, double s0, double s1,
                                  std::function<RMat(double)> G,
                                  std::function<RMat(double)> Gdot,
                                  bool closed = false) {
  MetricPath p;
  p.m = m;
  p.s0 = s0;
  p.s1 = s1;
  p.closed = closed;
  p.G = std::move(G);
  p.Gdot = std::move(Gdot);
  return p;
}

// R(psi)^T diag(d) R(psi) with psi = rate * (s - s0); a half turn closes
// the loop since R(pi) = -Id acts trivially by conjugation.
inline MetricPath rotating_path(const RVec& diag, double rate, double s0,
                                double s1) {
  int m = static_cast<int>(diag.size());
  if (m != 2) throw std::invalid_argument("rotating_path: only m = 2");
  auto R = [](double psi) {
    RMat r(2, 2);
    r << std::cos(psi), std::sin(psi), -std::sin(psi), std::cos(psi);
    return r;
  };
  MetricPath p;
  p.m = m;
  p.s0 = s0;
  p.s1 = s1;
  RMat D = diag.asDiagonal();
  p.G = [=](double s) { return RMat(R(rate * (s - s0)).transpose() * D * R(rate * (s - s0))); };
  p.Gdot = [=](double s) {
    RMat K(2, 2);
    K << 0, 1, -1, 0;
    RMat r = R(rate * (s - s0));
    RMat dR = rate * K * r;
    return RMat(dR.transpose() * D * r + r.transpose() * D * dR);
  };
  p.closed = std::abs(std::remainder(rate * (s1 - s0), M_PI)) < 1e-12;
  return p;
}

// interpolating path through samples at uniform nodes of [0, L) (periodic)
inline MetricPath sampled_path_periodic(double L, const std::vector<RMat>& samples) {
  if (samples.empty()) throw std::invalid_argument("sampled_path_periodic: no samples");
  int m = static_cast<int>(samples[0].rows());
  int n = static_cast<int>(samples.size());
  auto series = std::make_shared<std::vector<FourierSeries>>();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::vector<double> v(n);
      for (int j = 0; j < n; ++j) v[j] = samples[j](a, b);
      series->push_back(FourierSeries::fit(L, v));
    }
  MetricPath p;
  p.m = m;
  p.s0 = 0.0;
  p.s1 = L;
  p.closed = true;
  p.G = [series, m](double s) {
    RMat g(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) g(a, b) = (*series)[a * m + b].eval(s);
    return RMat(0.5 * (g + g.transpose()));
  };
  p.Gdot = [series, m](double s) {
    RMat g(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) g(a, b) = (*series)[a * m + b].eval_derivative(s);
    return RMat(0.5 * (g + g.transpose()));
  };
  return p;
}

inline MetricPath sampled_path_interval(double a, double b,
                                        const std::vector<RMat>& samples) {
  if (samples.size() < 2) throw std::invalid_argument("sampled_path_interval: need samples");
  int m = static_cast<int>(samples[0].rows());
  int n = static_cast<int>(samples.size());
  auto series = std::make_shared<std::vector<ChebSeries>>();
  auto deriv = std::make_shared<std::vector<ChebSeries>>();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::vector<double> v(n);
      // samples are listed at the CGL nodes of [a,b], which run from b to a;
      // callers build them with ChebSeries::nodes
      for (int k = 0; k < n; ++k) v[k] = samples[k](i, j);
      ChebSeries cs = ChebSeries::fit(a, b, v);
      series->push_back(cs);
      deriv->push_back(cs.derivative());
    }
  MetricPath p;
  p.m = m;
  p.s0 = a;
  p.s1 = b;
  p.G = [series, m](double s) {
    RMat g(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g(i, j) = (*series)[i * m + j].eval(s);
    return RMat(0.5 * (g + g.transpose()));
  };
  p.Gdot = [deriv, m](double s) {
    RMat g(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g(i, j) = (*deriv)[i * m + j].eval(s);
    return RMat(0.5 * (g + g.transpose()));
  };
  return p;
}

namespace detail {

struct FrameData {
  RMat E;     // G^{-1/2}
  RMat Edot;  // via X G^{1/2} + G^{1/2} X = Gdot, Edot = -E X E
};

inline FrameData frame_data(const RMat& G, const RMat& Gdot) {
  Eigen::SelfAdjointEigenSolver<RMat> es(G);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error("bbgm: metric along path not positive definite");
  RMat V = es.eigenvectors();
  RVec sq = es.eigenvalues().cwiseSqrt();
  int m = static_cast<int>(G.rows());
  FrameData f;
  f.E = V * sq.cwiseInverse().asDiagonal() * V.transpose();
  RMat gt = V.transpose() * Gdot * V;
  RMat X(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = gt(i, j) / (sq[i] + sq[j]);
  f.Edot = -f.E * (V * X * V.transpose()) * f.E;
  return f;
}

}  // namespace detail

// frame rotation rate of the family: w_ij(s) = h(nabla_{d/ds} e_i, e_j)
// on the cylinder G(s) + ds^2, for the symmetric-root frame E = G^{-1/2}
inline RMat transport_generator(const RMat& G, const RMat& Gdot) {
  detail::FrameData f = detail::frame_data(G, Gdot);
  RMat omega = f.Edot.transpose() * G * f.E + 0.5 * f.E.transpose() * Gdot * f.E;
  return 0.5 * (omega - omega.transpose().eval());
}

// Weingarten map of the slice in frame components: -(1/2) E^T Gdot E
inline RMat weingarten_frame(const RMat& G, const RMat& Gdot) {
  detail::FrameData f = detail::frame_data(G, Gdot);
  return RMat(-0.5 * f.E.transpose() * Gdot * f.E);
}

struct TransportResult {
  Mat U;            // unitary transport on frame components
  int steps = 0;
  double err = 0.0; // step-halving difference
  double unitarity_defect = 0.0;
};

namespace detail {

inline Mat transport_rk4(const MetricPath& path, const GammaRep& rep,
                         double s_from, double s_to, int steps) {
  const int d = rep.d;
  Mat U = Mat::Identity(d, d);
  const double h = (s_to - s_from) / steps;
  auto A = [&](double s) -> Mat {
    return -spin_generator(rep, transport_generator(path.G(s), path.Gdot(s)));
  };
  for (int k = 0; k < steps; ++k) {
    double s = s_from + k * h;
    Mat a1 = A(s);
    Mat a2 = A(s + 0.5 * h);
    Mat a3 = a2;  // same evaluation point, reused for both middle stages
    Mat a4 = A(s + h);
    Mat k1 = a1 * U;
    Mat k2 = a2 * (U + 0.5 * h * k1);
    Mat k3 = a3 * (U + 0.5 * h * k2);
    Mat k4 = a4 * (U + h * k3);
    U += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return U;
}

}  // namespace detail

// Integrates the frame-component equation sigma' = -spin_generator(w) sigma
// with classical RK4; the step count is doubled until the step-halving
// difference meets tol.
inline TransportResult bbgm_transport_matrix(const MetricPath& path,
                                             const GammaRep& rep,
                                             double s_from, double s_to,
                                             double tol = 1e-12) {
  TransportResult res;
  if (s_from == s_to) {
    res.U = Mat::Identity(rep.d, rep.d);
    return res;
  }
  int steps = 32;
  Mat coarse = detail::transport_rk4(path, rep, s_from, s_to, steps);
  while (true) {
    Mat fine = detail::transport_rk4(path, rep, s_from, s_to, steps * 2);
    double diff = (fine - coarse).norm();
    if (diff <= tol || steps >= (1 << 16)) {
      if (diff > tol)
        throw std::runtime_error("bbgm_transport: step halving did not converge");
      res.U = fine;
      res.steps = steps * 2;
      res.err = diff;
      res.unitarity_defect =
          (fine.adjoint() * fine - Mat::Identity(rep.d, rep.d)).norm();
      return res;
    }
    coarse = fine;
    steps *= 2;
  }
}

inline SpinorField bbgm_transport(const MetricPath& path, const SpinorField& phi0,
                                  double s_from, double s_to,
                                  TransportResult* info = nullptr,
                                  double tol = 1e-12) {
  TransportResult res = bbgm_transport_matrix(path, *phi0.rep, s_from, s_to, tol);
  SpinorField out = phi0;
  for (long p = 0; p < phi0.grid.total(); ++p) out.set(p, res.U * phi0.vec(p));
  if (info) *info = res;
  return out;
}

// the parallel spinors of a flat torus metric are the constant sections
inline std::vector<CVec> parallel_spinor_basis(const MetricField& G,
                                               const GammaRep& rep) {
  if (!G.flat)
    throw std::invalid_argument("parallel_spinor_basis: metric must be flat");
  std::vector<CVec> basis;
  for (int k = 0; k < rep.d; ++k) {
    CVec e = CVec::Zero(rep.d);
    e[k] = 1.0;
    basis.push_back(e);
  }
  return basis;
}

inline SpinorField constant_spinor_field(const TorusGrid& grid,
                                         std::shared_ptr<const GammaRep> rep,
                                         const CVec& v) {
  SpinorField phi(grid, std::move(rep));
  for (long p = 0; p < grid.total(); ++p) phi.set(p, v);
  return phi;
}

struct HolonomyResult {
  Mat P;
  bool has_alt = false;
  Mat P_alt;  // the other spin lift when a gluing map is present
  int steps = 0;
  double err = 0.0;
  double unitarity_defect = 0.0;
};

inline HolonomyResult loop_holonomy(const MetricPath& path, const GammaRep& rep,
                                    double tol = 1e-12) {
  RMat zeta = path.has_zeta() ? path.zeta : RMat::Identity(path.m, path.m);
  RMat g0 = path.G(path.s0);
  RMat g1 = path.G(path.s1);
  if (!path.closed || (g1 - zeta.transpose() * g0 * zeta).norm() > 1e-9)
    throw std::invalid_argument("loop_holonomy: endpoint metrics do not match");

  TransportResult t = bbgm_transport_matrix(path, rep, path.s0, path.s1, tol);
  HolonomyResult res;
  res.steps = t.steps;
  res.err = t.err;
  if (!path.has_zeta()) {
    res.P = t.U;
  } else {
    detail::FrameData f0 = detail::frame_data(g0, RMat::Zero(path.m, path.m));
    detail::FrameData f1 = detail::frame_data(g1, RMat::Zero(path.m, path.m));
    RMat O = f0.E.inverse() * zeta * f1.E;
    Mat S = spin_lift(rep, O);
    res.P = S * t.U;
    res.has_alt = true;
    res.P_alt = -res.P;
  }
  res.unitarity_defect =
      (res.P.adjoint() * res.P - Mat::Identity(rep.d, rep.d)).norm();
  return res;
}

struct FittingResult {
  bool fits = false;
  bool is_eigenvector = false;
  cplx theta = cplx(1, 0);
  double eigen_residual = 0.0;
  int order = -1;  // smallest l <= 64 with P^l = Id, or -1
  std::vector<cplx> spectrum;
};

inline FittingResult fitting_check(const Mat& P, const CVec& phi0,
                                   double tol = 1e-8) {
  FittingResult res;
  double n0 = phi0.norm();
  if (n0 == 0.0) throw std::invalid_argument("fitting_check: zero spinor");
  CVec img = P * phi0;
  res.fits = (img - phi0).norm() <= tol * n0;
  res.theta = phi0.dot(img) / (n0 * n0);
  res.eigen_residual = (img - res.theta * phi0).norm() / n0;
  res.is_eigenvector = res.eigen_residual <= tol;

  Eigen::ComplexEigenSolver<Mat> es(P);
  for (int i = 0; i < P.rows(); ++i) res.spectrum.push_back(es.eigenvalues()[i]);

  Mat acc = Mat::Identity(P.rows(), P.cols());
  for (int l = 1; l <= 64; ++l) {
    acc = acc * P;
    if ((acc - Mat::Identity(P.rows(), P.cols())).norm() <= 1e-6) {
      res.order = l;
      break;
    }
  }
  return res;
}

}  // namespace spingeo
