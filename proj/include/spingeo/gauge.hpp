#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <functional>

#include "spingeo/bbgm.hpp"
#include "spingeo/geometry.hpp"
#include "spingeo/interp1d.hpp"

namespace spingeo {

// s-sampled family of (possibly x-dependent) torus metrics; uniform nodes
// on [0,L) for periodic families, Chebyshev-Gauss-Lobatto nodes otherwise.
struct SampledMetricPath {
  TorusGrid grid;
  int m = 0;
  bool periodic = false;
  double s0 = 0.0, s1 = 1.0;
  std::vector<double> nodes;
  std::vector<MetricField> G;
};

inline SampledMetricPath discretize_path(const MetricPath& p, const TorusGrid& grid,
                                         int n_nodes, bool periodic) {
  SampledMetricPath sp;
  sp.grid = grid;
  sp.m = p.m;
  sp.periodic = periodic;
  sp.s0 = p.s0;
  sp.s1 = p.s1;
  if (periodic) {
    sp.nodes = FourierSeries::nodes(p.s1 - p.s0, n_nodes);
    for (double& s : sp.nodes) s += p.s0;
  } else {
    sp.nodes = ChebSeries::nodes(p.s0, p.s1, n_nodes);
  }
  for (double s : sp.nodes) sp.G.push_back(MetricField::constant(grid, p.G(s)));
  return sp;
}

// node-to-node differentiation matrices (exact on the interpolant)
inline RMat cheb_diff_matrix(double a, double b, int n_nodes) {
  RMat D(n_nodes, n_nodes);
  std::vector<double> nodes = ChebSeries::nodes(a, b, n_nodes - 1);
  for (int j = 0; j < n_nodes; ++j) {
    std::vector<double> e(n_nodes, 0.0);
    e[j] = 1.0;
    ChebSeries der = ChebSeries::fit(a, b, e).derivative();
    for (int i = 0; i < n_nodes; ++i) D(i, j) = der.eval(nodes[i]);
  }
  return D;
}

inline RMat fourier_diff_matrix(double L, int n_nodes) {
  RMat D(n_nodes, n_nodes);
  std::vector<double> nodes = FourierSeries::nodes(L, n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    std::vector<double> e(n_nodes, 0.0);
    e[j] = 1.0;
    FourierSeries s = FourierSeries::fit(L, e);
    for (int i = 0; i < n_nodes; ++i) D(i, j) = s.eval_derivative(nodes[i]);
  }
  return D;
}

inline RMat path_diff_matrix(const SampledMetricPath& p) {
  int n = static_cast<int>(p.nodes.size());
  return p.periodic ? fourier_diff_matrix(p.s1 - p.s0, n)
                    : cheb_diff_matrix(p.s0, p.s1, n);
}

inline std::vector<SymTensorField> path_derivative(const SampledMetricPath& p) {
  int n = static_cast<int>(p.nodes.size());
  RMat D = path_diff_matrix(p);
  std::vector<SymTensorField> out(n, SymTensorField(p.grid, p.m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (D(i, j) == 0.0) continue;
      for (size_t t = 0; t < out[i].v.size(); ++t)
        out[i].v[t] += D(i, j) * p.G[j].v[t];
    }
  return out;
}

// max over s-nodes of || div^{g_s} dg/ds ||_{L2}
inline double verify_divfree(const SampledMetricPath& p) {
  std::vector<SymTensorField> hdot = path_derivative(p);
  double worst = 0.0;
  for (size_t k = 0; k < p.G.size(); ++k) {
    MetricGeometry geo = make_geometry(p.G[k]);
    worst = std::max(worst, l2_norm(geo, divergence_symtensor(geo, hdot[k])));
  }
  return worst;
}

// Per-Fourier-mode solve of 2 div div* alpha = div h over a constant
// metric background. The zero mode (the kernel, constant one-forms) is set
// to zero; Nyquist-bearing modes are dropped like in the derivatives.
inline OneFormField solve_gauge_step(const MetricGeometry& geo,
                                     const SymTensorField& h) {
  if (!geo.G.flat)
    throw std::invalid_argument("solve_gauge_step: background must be constant");
  const int m = geo.m;
  const TorusGrid& grid = geo.grid();
  const long n = grid.total();
  RMat ginv = geo.ginv(0);

  std::vector<cplx> hw(h.v.begin(), h.v.end());
  for (int a = 0; a < m; ++a) fft_axis(grid, hw, m * m, a, false);

  std::vector<cplx> aw(n * m, cplx(0, 0));
  std::vector<int> idx;
  for (long q = 0; q < n; ++q) {
    grid.unflatten(q, idx);
    bool skip = true, nyquist = false;
    RVec kappa(m);
    for (int a = 0; a < m; ++a) {
      int f = TorusGrid::freq(idx[a], grid.sizes[a]);
      if (idx[a] == grid.sizes[a] / 2) nyquist = true;
      if (f != 0) skip = false;
      kappa[a] = 2.0 * M_PI * f;
    }
    if (skip || nyquist) continue;

    // b_b = -i g^{ac} kappa_a hhat_bc
    CVec rhs(m);
    for (int b = 0; b < m; ++b) {
      cplx sum(0, 0);
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c)
          sum += ginv(a, c) * kappa[a] * hw[(q * m + b) * m + c];
      rhs[b] = cplx(0, -1) * sum;
    }
    RVec gk = ginv * kappa;
    double kgk = kappa.dot(gk);
    RMat M = kappa * gk.transpose() + kgk * RMat::Identity(m, m);
    Eigen::PartialPivLU<RMat> lu(M);
    RMat inv = lu.inverse();
    if (inv.norm() * M.norm() > 1e12)
      throw std::runtime_error("solve_gauge_step: mode system ill-conditioned");
    for (int b = 0; b < m; ++b) {
      cplx sum(0, 0);
      for (int c = 0; c < m; ++c) sum += inv(b, c) * rhs[c];
      aw[q * m + b] = sum;
    }
  }
  fft_axis(grid, aw, m, 0, true);
  for (int a = 1; a < m; ++a) fft_axis(grid, aw, m, a, true);
  OneFormField alpha(grid, m);
  for (long t = 0; t < n * m; ++t) alpha.v[t] = aw[t].real();
  return alpha;
}

// Truncated Fourier representation of a real multi-component grid field,
// for evaluation at off-grid points.
struct TrigField {
  int m = 0, ncomp = 0;
  std::vector<std::vector<int>> modes;
  std::vector<CVec> coef;  // per mode, ncomp entries

  static TrigField fit(const TorusGrid& grid, const std::vector<double>& data,
                       int ncomp, double rel_thresh = 1e-13) {
    TrigField tf;
    tf.m = grid.dim();
    tf.ncomp = ncomp;
    std::vector<cplx> w(data.begin(), data.end());
    for (int a = 0; a < tf.m; ++a) fft_axis(grid, w, ncomp, a, false);
    const long n = grid.total();
    for (auto& c : w) c /= static_cast<double>(n);
    double top = 0.0;
    for (const auto& c : w) top = std::max(top, std::abs(c));
    std::vector<int> idx;
    for (long q = 0; q < n; ++q) {
      double mx = 0.0;
      for (int c = 0; c < ncomp; ++c) mx = std::max(mx, std::abs(w[q * ncomp + c]));
      if (mx <= rel_thresh * top) continue;
      grid.unflatten(q, idx);
      bool nyquist = false;
      for (int a = 0; a < tf.m; ++a)
        if (idx[a] == grid.sizes[a] / 2) nyquist = true;
      if (nyquist) continue;
      std::vector<int> k(tf.m);
      for (int a = 0; a < tf.m; ++a) k[a] = TorusGrid::freq(idx[a], grid.sizes[a]);
      CVec cv(ncomp);
      for (int c = 0; c < ncomp; ++c) cv[c] = w[q * ncomp + c];
      tf.modes.push_back(k);
      tf.coef.push_back(cv);
    }
    return tf;
  }

  void eval(const RVec& x, RVec& out) const {
    out = RVec::Zero(ncomp);
    for (size_t s = 0; s < modes.size(); ++s) {
      double ph = 0.0;
      for (int a = 0; a < m; ++a) ph += modes[s][a] * x[a];
      cplx e = std::exp(cplx(0, 2.0 * M_PI * ph));
      for (int c = 0; c < ncomp; ++c) out[c] += (coef[s][c] * e).real();
    }
  }

  // out(c, a) = d(comp c)/dx_a
  void eval_jacobian(const RVec& x, RMat& out) const {
    out = RMat::Zero(ncomp, m);
    for (size_t s = 0; s < modes.size(); ++s) {
      double ph = 0.0;
      for (int a = 0; a < m; ++a) ph += modes[s][a] * x[a];
      cplx e = std::exp(cplx(0, 2.0 * M_PI * ph));
      for (int c = 0; c < ncomp; ++c) {
        cplx base = coef[s][c] * e * cplx(0, 2.0 * M_PI);
        for (int a = 0; a < m; ++a) out(c, a) += (base * static_cast<double>(modes[s][a])).real();
      }
    }
  }

  void eval_with_jacobian(const RVec& x, RVec& out, RMat& jac) const {
    out = RVec::Zero(ncomp);
    jac = RMat::Zero(ncomp, m);
    for (size_t s = 0; s < modes.size(); ++s) {
      double ph = 0.0;
      for (int a = 0; a < m; ++a) ph += modes[s][a] * x[a];
      cplx e = std::exp(cplx(0, 2.0 * M_PI * ph));
      for (int c = 0; c < ncomp; ++c) {
        cplx val = coef[s][c] * e;
        out[c] += val.real();
        cplx base = val * cplx(0, 2.0 * M_PI);
        for (int a = 0; a < m; ++a)
          jac(c, a) += (base * static_cast<double>(modes[s][a])).real();
      }
    }
  }
};

// Time-dependent vector field given at the path's s-nodes, held as one
// shared mode list with per-node coefficients so that the s-interpolation
// collapses to a single trig sum per query.
struct FlowField {
  bool periodic = false;
  double s0 = 0.0, s1 = 1.0;
  std::vector<double> nodes;
  int m = 0;
  std::vector<std::vector<int>> modes;
  std::vector<std::vector<CVec>> coef;  // [node][mode](comp)

  // interpolation weights over nodes at parameter s
  RVec node_weights(double s) const {
    int n = static_cast<int>(nodes.size());
    RVec w(n);
    for (int j = 0; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      if (periodic)
        w[j] = FourierSeries::fit(s1 - s0, e).eval(s - s0);
      else
        w[j] = ChebSeries::fit(s0, s1, e).eval(s);
    }
    return w;
  }

  // trig field with node coefficients collapsed at parameter s
  TrigField at(double s) const {
    RVec w = node_weights(s);
    TrigField tf;
    tf.m = m;
    tf.ncomp = m;
    tf.modes = modes;
    tf.coef.assign(modes.size(), CVec::Zero(m));
    for (size_t k = 0; k < nodes.size(); ++k) {
      if (w[k] == 0.0) continue;
      for (size_t s2 = 0; s2 < modes.size(); ++s2) tf.coef[s2] += w[k] * coef[k][s2];
    }
    return tf;
  }
};

inline FlowField make_flow_field(const SampledMetricPath& path,
                                 const std::vector<VectorField>& X) {
  FlowField f;
  f.periodic = path.periodic;
  f.s0 = path.s0;
  f.s1 = path.s1;
  f.nodes = path.nodes;
  f.m = path.m;
  std::vector<TrigField> per_node;
  per_node.reserve(X.size());
  for (const VectorField& x : X)
    per_node.push_back(TrigField::fit(path.grid, x.v, path.m));
  // union of all node mode lists
  std::map<std::vector<int>, int> index;
  for (const TrigField& tf : per_node)
    for (const auto& k : tf.modes)
      if (!index.count(k)) {
        index[k] = static_cast<int>(f.modes.size());
        f.modes.push_back(k);
      }
  f.coef.assign(per_node.size(), std::vector<CVec>(f.modes.size(), CVec::Zero(path.m)));
  for (size_t n = 0; n < per_node.size(); ++n)
    for (size_t s = 0; s < per_node[n].modes.size(); ++s)
      f.coef[n][index[per_node[n].modes[s]]] = per_node[n].coef[s];
  return f;
}

// Integrates the flow of X_s from s0 and pulls the metric samples back:
// gtilde_k(x) = DPhi_k(x)^T G_k(Phi_k(x)) DPhi_k(x). Displacements are
// limited to one grid cell per RK step.
inline SampledMetricPath flow_pullback(const SampledMetricPath& path,
                                       const FlowField& X, int substeps = 8) {
  const int m = path.m;
  const TorusGrid& grid = path.grid;
  const long npts = grid.total();
  const int nn = static_cast<int>(path.nodes.size());

  double min_cell = 1.0;
  for (int a = 0; a < m; ++a) min_cell = std::min(min_cell, 1.0 / grid.sizes[a]);

  std::vector<RVec> pos(npts, RVec(m));
  std::vector<RMat> jac(npts, RMat::Identity(m, m));
  std::vector<double> xv;
  for (long p = 0; p < npts; ++p) {
    grid.coords(p, xv);
    for (int a = 0; a < m; ++a) pos[p][a] = xv[a];
  }

  SampledMetricPath out = path;
  auto record_node = [&](int k) {
    TrigField gk = TrigField::fit(grid, path.G[k].v, m * m, 1e-12);
    RVec gv(m * m);
    MetricField& tgt = out.G[k];
    bool constant_out = true;
    for (long p = 0; p < npts; ++p) {
      gk.eval(pos[p], gv);
      RMat gmat(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) gmat(a, b) = gv[a * m + b];
      RMat res = jac[p].transpose() * gmat * jac[p];
      tgt.set(p, 0.5 * (res + res.transpose().eval()));
      if (p > 0 && (tgt.mat(p) - tgt.mat(0)).norm() > 1e-13) constant_out = false;
    }
    tgt.flat = constant_out;
  };

  // advance through nodes in ascending s (Chebyshev nodes are stored
  // descending), recording the pullback at each; the flow is the identity
  // at the smallest node
  std::vector<int> order(nn);
  for (int k = 0; k < nn; ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return path.nodes[a] < path.nodes[b]; });

  record_node(order[0]);
  RVec k1(m), k2(m), k3(m), k4(m);
  RMat j1(m, m), j2(m, m), j3(m, m), j4(m, m);
  for (int k = 1; k < nn; ++k) {
    double sa = path.nodes[order[k - 1]];
    double sb = path.nodes[order[k]];
    double h = (sb - sa) / substeps;
    for (int step = 0; step < substeps; ++step) {
      double s = sa + step * h;
      TrigField f1 = X.at(s);
      TrigField f2 = X.at(s + 0.5 * h);
      TrigField f4 = X.at(s + h);
      for (long p = 0; p < npts; ++p) {
        RVec& x = pos[p];
        RMat& J = jac[p];
        f1.eval_with_jacobian(x, k1, j1);
        RVec x2 = x + 0.5 * h * k1;
        f2.eval_with_jacobian(x2, k2, j2);
        RVec x3 = x + 0.5 * h * k2;
        f2.eval_with_jacobian(x3, k3, j3);
        RVec x4 = x + h * k3;
        f4.eval_with_jacobian(x4, k4, j4);

        RVec dx = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (dx.lpNorm<Eigen::Infinity>() > min_cell)
          throw std::runtime_error("flow_pullback: displacement exceeds one cell per step");
        // dJ/ds = DX(Phi) J, advanced with the same stages
        RMat K1 = j1 * J;
        RMat K2 = j2 * (J + 0.5 * h * K1);
        RMat K3 = j3 * (J + 0.5 * h * K2);
        RMat K4 = j4 * (J + h * K3);
        x += dx;
        J += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
      }
    }
    record_node(order[k]);
  }
  return out;
}

struct GaugeSolve {
  std::vector<OneFormField> alpha;  // from the first corrective solve
  std::vector<VectorField> X;
  std::vector<double> div_history;  // max-over-nodes divergence per sweep
  double div_before = 0.0;
  double div_after = 0.0;
  int iterations = 0;
};

// One corrective sweep: solve on each node's constant part, flow along -alpha#.
inline std::pair<SampledMetricPath, std::vector<OneFormField>> gauge_sweep(
    const SampledMetricPath& path, int substeps = 8) {
  const int m = path.m;
  std::vector<SymTensorField> hdot = path_derivative(path);
  std::vector<OneFormField> alphas;
  std::vector<VectorField> Xs;
  for (size_t k = 0; k < path.G.size(); ++k) {
    // constant part of the metric as the elliptic background
    RMat mean = RMat::Zero(m, m);
    for (long p = 0; p < path.grid.total(); ++p) mean += path.G[k].mat(p);
    mean /= static_cast<double>(path.grid.total());
    MetricGeometry flat = make_geometry(MetricField::constant(path.grid, mean));
    OneFormField a = solve_gauge_step(flat, hdot[k]);
    VectorField x(path.grid, m);
    RMat minv = mean.inverse();
    for (long p = 0; p < path.grid.total(); ++p) x.set(p, -minv * a.vec(p));
    alphas.push_back(a);
    Xs.push_back(x);
  }
  FlowField flow = make_flow_field(path, Xs);
  return {flow_pullback(path, flow, substeps), std::move(alphas)};
}

inline std::pair<SampledMetricPath, GaugeSolve> gauge_fix(
    const SampledMetricPath& path, int max_iterations = 3, double tol = 1e-6,
    int substeps = 8) {
  GaugeSolve log;
  SampledMetricPath cur = path;
  log.div_before = verify_divfree(cur);
  log.div_history.push_back(log.div_before);
  for (int it = 0; it < max_iterations && log.div_history.back() > tol; ++it) {
    auto [next, alphas] = gauge_sweep(cur, substeps);
    if (it == 0) {
      log.alpha = alphas;
      for (size_t k = 0; k < alphas.size(); ++k) {
        RMat mean = RMat::Zero(path.m, path.m);
        for (long p = 0; p < path.grid.total(); ++p) mean += cur.G[k].mat(p);
        mean /= static_cast<double>(path.grid.total());
        VectorField x(path.grid, path.m);
        RMat minv = mean.inverse();
        for (long p = 0; p < path.grid.total(); ++p)
          x.set(p, -minv * alphas[k].vec(p));
        log.X.push_back(x);
      }
    }
    cur = next;
    ++log.iterations;
    log.div_history.push_back(verify_divfree(cur));
  }
  log.div_after = log.div_history.back();
  return {cur, log};
}

}  // namespace spingeo
