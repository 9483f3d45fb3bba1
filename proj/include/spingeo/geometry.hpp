#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "spingeo/clifford.hpp"
#include "spingeo/fields.hpp"

namespace spingeo {

// Everything derived from a metric that the differential operators need:
// inverse, volume density, orthonormal frame E = G^{-1/2} (symmetric root),
// coordinate Christoffel symbols and the frame spin connection
// w_ij(e_k) = g(nabla_{e_k} e_i, e_j).
struct MetricGeometry {
  MetricField G;
  int m = 0;
  std::vector<double> Ginv;     // [(p*m + a)*m + b]
  std::vector<double> sqrtdet;  // [p]
  FrameField E;
  std::vector<double> dG;       // [((p*m + a)*m + b)*m + c] = d_a G_bc
  std::vector<double> gamma;    // [((p*m + k)*m + a)*m + b] = Gamma^k_ab
  std::vector<double> dE;       // [((p*m + a)*m + b)*m + i] = d_a E_bi
  std::vector<double> spin;     // [((p*m + k)*m + i)*m + j] = w_ij(e_k)

  long total() const { return G.grid.total(); }
  const TorusGrid& grid() const { return G.grid; }

  RMat ginv(long p) const {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(Ginv.data() + p * m * m,
                                                            m, m);
  }
  double christoffel(long p, int k, int a, int b) const {
    return gamma[((p * m + k) * m + a) * m + b];
  }
  double spin_conn(long p, int k, int i, int j) const {
    return spin[((p * m + k) * m + i) * m + j];
  }
  // frame direction k as antisymmetric matrix w_ij(e_k)
  RMat spin_mat(long p, int k) const {
    RMat w(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) w(i, j) = spin_conn(p, k, i, j);
    return w;
  }
  double weight(long p) const { return sqrtdet[p] / static_cast<double>(total()); }
};

inline MetricGeometry make_geometry(const MetricField& G) {
  MetricGeometry geo;
  geo.G = G;
  const int m = G.m;
  geo.m = m;
  const TorusGrid& grid = G.grid;
  const long n = grid.total();

  geo.Ginv.resize(n * m * m);
  geo.sqrtdet.resize(n);
  geo.E = FrameField(grid, m);
  for (long p = 0; p < n; ++p) {
    RMat g = G.mat(p);
    Eigen::SelfAdjointEigenSolver<RMat> es(g);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("make_geometry: metric not positive definite");
    RMat V = es.eigenvectors();
    RVec lam = es.eigenvalues();
    RMat inv = V * lam.cwiseInverse().asDiagonal() * V.transpose();
    RMat e = V * lam.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) geo.Ginv[(p * m + a) * m + b] = inv(a, b);
    geo.E.set(p, e);
    geo.sqrtdet[p] = std::sqrt(lam.prod());
  }

  // coordinate derivatives of G (spectral, exact for bandlimited G) and of
  // E (pointwise from dG: with X solving X G^{1/2} + G^{1/2} X = dG one has
  // dE = -E X E, which keeps d(E^T G E) = 0 exact and the spin connection
  // antisymmetric to roundoff)
  geo.dG.assign(n * m * m * m, 0.0);
  geo.dE.assign(n * m * m * m, 0.0);
  if (!G.flat) {
    for (int a = 0; a < m; ++a) {
      std::vector<double> dg = spectral_derivative_real(grid, G.v, m * m, a);
      for (long p = 0; p < n; ++p)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c)
            geo.dG[((p * m + a) * m + b) * m + c] = dg[(p * m + b) * m + c];
    }
    for (long p = 0; p < n; ++p) {
      Eigen::SelfAdjointEigenSolver<RMat> es(G.mat(p));
      RMat V = es.eigenvectors();
      RVec sq = es.eigenvalues().cwiseSqrt();
      RMat e = geo.E.mat(p);
      for (int a = 0; a < m; ++a) {
        RMat dg(m, m);
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c)
            dg(b, c) = geo.dG[((p * m + a) * m + b) * m + c];
        RMat dgt = V.transpose() * dg * V;
        RMat X(m, m);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) X(i, j) = dgt(i, j) / (sq[i] + sq[j]);
        RMat de = -e * (V * X * V.transpose()) * e;
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c)
            geo.dE[((p * m + a) * m + b) * m + c] = de(b, c);
      }
    }
  }

  // Gamma^k_ab = (1/2) G^{kl} (d_a G_bl + d_b G_al - d_l G_ab)
  geo.gamma.assign(n * m * m * m, 0.0);
  if (!G.flat) {
    for (long p = 0; p < n; ++p) {
      for (int k = 0; k < m; ++k)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) {
            double sum = 0.0;
            for (int l = 0; l < m; ++l) {
              double term = geo.dG[((p * m + a) * m + b) * m + l] +
                            geo.dG[((p * m + b) * m + a) * m + l] -
                            geo.dG[((p * m + l) * m + a) * m + b];
              sum += geo.Ginv[(p * m + k) * m + l] * term;
            }
            geo.gamma[((p * m + k) * m + a) * m + b] = 0.5 * sum;
          }
    }
  }

  // w_ij(e_k) = g(nabla_{e_k} e_i, e_j)
  geo.spin.assign(n * m * m * m, 0.0);
  if (!G.flat) {
    for (long p = 0; p < n; ++p) {
      RMat e = geo.E.mat(p);
      RMat g = G.mat(p);
      RMat ge = g * e;
      for (int k = 0; k < m; ++k) {
        // C(a,i) = coordinates of nabla_{e_k} e_i
        RMat C = RMat::Zero(m, m);
        for (int i = 0; i < m; ++i)
          for (int a = 0; a < m; ++a) {
            double sum = 0.0;
            for (int b = 0; b < m; ++b) {
              double db_Eai = geo.dE[((p * m + b) * m + a) * m + i];
              double conn = 0.0;
              for (int cidx = 0; cidx < m; ++cidx)
                conn += geo.gamma[((p * m + a) * m + b) * m + cidx] * e(cidx, i);
              sum += e(b, k) * (db_Eai + conn);
            }
            C(a, i) = sum;
          }
        RMat w = C.transpose() * ge;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            geo.spin[((p * m + k) * m + i) * m + j] = w(i, j);
      }
    }
  }
  return geo;
}

// --- L2 pairings (trapezoidal quadrature, exact for bandlimited data) ---

inline double l2_inner(const MetricGeometry& geo, const ScalarField& a,
                       const ScalarField& b) {
  double sum = 0.0;
  for (long p = 0; p < geo.total(); ++p) sum += a.at(p) * b.at(p) * geo.weight(p);
  return sum;
}

inline double l2_inner(const MetricGeometry& geo, const OneFormField& a,
                       const OneFormField& b) {
  double sum = 0.0;
  for (long p = 0; p < geo.total(); ++p) {
    RMat gi = geo.ginv(p);
    sum += (a.vec(p).transpose() * gi * b.vec(p)).value() * geo.weight(p);
  }
  return sum;
}

inline double l2_inner(const MetricGeometry& geo, const SymTensorField& a,
                       const SymTensorField& b) {
  double sum = 0.0;
  for (long p = 0; p < geo.total(); ++p) {
    RMat gi = geo.ginv(p);
    sum += (gi * a.mat(p) * gi * b.mat(p)).trace() * geo.weight(p);
  }
  return sum;
}

inline cplx l2_inner(const MetricGeometry& geo, const SpinorField& a,
                     const SpinorField& b) {
  cplx sum(0, 0);
  for (long p = 0; p < geo.total(); ++p)
    sum += b.vec(p).dot(a.vec(p)) * geo.weight(p);
  return sum;
}

inline cplx l2_inner(const MetricGeometry& geo, const SpinorOneForm& a,
                     const SpinorOneForm& b) {
  cplx sum(0, 0);
  for (long p = 0; p < geo.total(); ++p)
    for (int j = 0; j < a.m; ++j) sum += b.col(p, j).dot(a.col(p, j)) * geo.weight(p);
  return sum;
}

template <typename F>
double l2_norm(const MetricGeometry& geo, const F& a) {
  return std::sqrt(std::abs(l2_inner(geo, a, a)));
}

// --- first-order operators ---

// covariant derivative of h in coordinates, T[a][b][c] = (nabla_a h)_bc
inline std::vector<double> covariant_derivative_symtensor(
    const MetricGeometry& geo, const SymTensorField& h) {
  const int m = geo.m;
  const TorusGrid& grid = geo.grid();
  const long n = grid.total();
  std::vector<double> T(n * m * m * m, 0.0);
  std::vector<std::vector<double>> dh(m);
  for (int a = 0; a < m; ++a) dh[a] = spectral_derivative_real(grid, h.v, m * m, a);
  for (long p = 0; p < n; ++p)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) {
          double val = dh[a][(p * m + b) * m + c];
          for (int e = 0; e < m; ++e) {
            val -= geo.christoffel(p, e, a, b) * h.at(p, e, c);
            val -= geo.christoffel(p, e, a, c) * h.at(p, b, e);
          }
          T[((p * m + a) * m + b) * m + c] = val;
        }
  return T;
}

// div h = sum_i (-nabla_{e_i} h)(. , e_i), in coordinates
// (div h)_b = -g^{ac} (nabla_a h)_bc
inline OneFormField divergence_symtensor(const MetricGeometry& geo,
                                         const SymTensorField& h) {
  const int m = geo.m;
  std::vector<double> T = covariant_derivative_symtensor(geo, h);
  OneFormField out(geo.grid(), m);
  for (long p = 0; p < geo.total(); ++p)
    for (int b = 0; b < m; ++b) {
      double sum = 0.0;
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c)
          sum -= geo.Ginv[(p * m + a) * m + c] * T[((p * m + a) * m + b) * m + c];
      out.at(p, b) = sum;
    }
  return out;
}

// L2-adjoint of the divergence above: div* alpha = sym(nabla alpha)
inline SymTensorField div_adjoint(const MetricGeometry& geo,
                                  const OneFormField& alpha) {
  const int m = geo.m;
  const TorusGrid& grid = geo.grid();
  SymTensorField out(grid, m);
  std::vector<std::vector<double>> da(m);
  for (int a = 0; a < m; ++a) da[a] = spectral_derivative_real(grid, alpha.v, m, a);
  for (long p = 0; p < geo.total(); ++p)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double nab_bc = da[b][p * m + c];
        double nab_cb = da[c][p * m + b];
        for (int e = 0; e < m; ++e) {
          nab_bc -= geo.christoffel(p, e, b, c) * alpha.at(p, e);
          nab_cb -= geo.christoffel(p, e, c, b) * alpha.at(p, e);
        }
        out.at(p, b, c) = 0.5 * (nab_bc + nab_cb);
      }
  return out;
}

inline SymTensorField lie_derivative_metric(const MetricGeometry& geo,
                                            const VectorField& X) {
  const int m = geo.m;
  const TorusGrid& grid = geo.grid();
  SymTensorField out(grid, m);
  std::vector<std::vector<double>> dX(m);
  for (int a = 0; a < m; ++a) dX[a] = spectral_derivative_real(grid, X.v, m, a);
  for (long p = 0; p < geo.total(); ++p) {
    RMat g = geo.G.mat(p);
    RMat nabla(m, m);  // nabla(b,a) = (nabla_b X)^a
    for (int b = 0; b < m; ++b)
      for (int a = 0; a < m; ++a) {
        double val = dX[b][p * m + a];
        for (int e = 0; e < m; ++e)
          val += geo.christoffel(p, a, b, e) * X.at(p, e);
        nabla(b, a) = val;
      }
    RMat lg = nabla * g;
    out.set(p, lg + lg.transpose());
  }
  return out;
}

inline OneFormField lower_index(const MetricGeometry& geo, const VectorField& X) {
  OneFormField out(geo.grid(), geo.m);
  for (long p = 0; p < geo.total(); ++p) out.set(p, geo.G.mat(p) * X.vec(p));
  return out;
}

inline VectorField raise_index(const MetricGeometry& geo, const OneFormField& a) {
  VectorField out(geo.grid(), geo.m);
  for (long p = 0; p < geo.total(); ++p) out.set(p, geo.ginv(p) * a.vec(p));
  return out;
}

// --- spinor operators ---

namespace detail {

// cached gamma products g_i g_j for the spin connection action
inline std::vector<Mat> gamma_products(const GammaRep& rep) {
  std::vector<Mat> prod(rep.n * rep.n);
  for (int i = 0; i < rep.n; ++i)
    for (int j = 0; j < rep.n; ++j) prod[i * rep.n + j] = rep.gamma[i] * rep.gamma[j];
  return prod;
}

}  // namespace detail

// columns are nabla_{e_i} phi = e_i(phi) + (1/4) sum w_jk(e_i) g_j g_k phi
inline SpinorOneForm covariant_derivative_spinor(const MetricGeometry& geo,
                                                 const SpinorField& phi) {
  const int m = geo.m;
  if (phi.rep->n != m)
    throw std::invalid_argument("covariant_derivative_spinor: rep/grid dim mismatch");
  const int d = phi.d();
  const TorusGrid& grid = geo.grid();
  SpinorOneForm out(grid, phi.rep, m);
  out.twist = phi.twist;

  std::vector<std::vector<cplx>> dphi(m);
  for (int a = 0; a < m; ++a)
    dphi[a] = spectral_derivative(grid, phi.c, d, a,
                                  a == 0 ? phi.twist_angle() : 0.0);

  std::vector<Mat> prod = detail::gamma_products(*phi.rep);
  CVec tmp(d), col(d);
  for (long p = 0; p < geo.total(); ++p) {
    RMat e = geo.E.mat(p);
    CVec ph = phi.vec(p);
    for (int i = 0; i < m; ++i) {
      col.setZero();
      for (int a = 0; a < m; ++a) {
        double w = e(a, i);
        if (w == 0.0) continue;
        for (int k = 0; k < d; ++k) col[k] += w * dphi[a][p * d + k];
      }
      if (!geo.G.flat) {
        for (int j = 0; j < m; ++j)
          for (int k = 0; k < m; ++k) {
            double w = geo.spin_conn(p, i, j, k);
            if (w != 0.0) col += 0.25 * w * (prod[j * m + k] * ph);
          }
      }
      out.set_col(p, i, col);
    }
  }
  return out;
}

inline SpinorField dirac(const MetricGeometry& geo, const SpinorField& phi) {
  SpinorOneForm grad = covariant_derivative_spinor(geo, phi);
  SpinorField out(geo.grid(), phi.rep);
  out.twist = phi.twist;
  for (long p = 0; p < geo.total(); ++p) {
    CVec sum = CVec::Zero(phi.d());
    for (int i = 0; i < geo.m; ++i) sum += phi.rep->gamma[i] * grad.col(p, i);
    out.set(p, sum);
  }
  return out;
}

// product connection on (spinors) x (one-forms):
// (nabla_{e_i} sigma)_j = nabla_{e_i}(sigma_j) - sum_k w_jk(e_i) sigma_k.
// Output layout: deriv[(p*m + i)*m + j] is a d-vector (direction i, column j).
struct SpinorTwoIndex {
  TorusGrid grid;
  std::shared_ptr<const GammaRep> rep;
  int m = 0;
  std::vector<cplx> c;  // [((p*m + i)*m + j)*d + k]

  CVec at(long p, int i, int j) const {
    return Eigen::Map<const CVec>(c.data() + ((p * m + i) * m + j) * rep->d, rep->d);
  }
  void set(long p, int i, int j, const CVec& x) {
    for (int k = 0; k < rep->d; ++k) c[((p * m + i) * m + j) * rep->d + k] = x[k];
  }
};

inline SpinorTwoIndex covariant_derivative_spinor_oneform(
    const MetricGeometry& geo, const SpinorOneForm& sigma) {
  const int m = geo.m;
  const int d = sigma.d();
  const TorusGrid& grid = geo.grid();
  SpinorTwoIndex out;
  out.grid = grid;
  out.rep = sigma.rep;
  out.m = m;
  out.c.assign(grid.total() * m * m * d, cplx(0, 0));

  double tw = std::arg(sigma.twist);
  std::vector<std::vector<cplx>> dsig(m);
  for (int a = 0; a < m; ++a)
    dsig[a] = spectral_derivative(grid, sigma.c, m * d, a, a == 0 ? tw : 0.0);

  std::vector<Mat> prod = detail::gamma_products(*sigma.rep);
  CVec col(d);
  for (long p = 0; p < geo.total(); ++p) {
    RMat e = geo.E.mat(p);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        col.setZero();
        for (int a = 0; a < m; ++a) {
          double w = e(a, i);
          if (w == 0.0) continue;
          for (int k = 0; k < d; ++k)
            col[k] += w * dsig[a][(p * m + j) * d + k];
        }
        if (!geo.G.flat) {
          CVec sj = sigma.col(p, j);
          for (int jj = 0; jj < m; ++jj)
            for (int kk = 0; kk < m; ++kk) {
              double w = geo.spin_conn(p, i, jj, kk);
              if (w != 0.0) col += 0.25 * w * (prod[jj * m + kk] * sj);
            }
          for (int k = 0; k < m; ++k) {
            double w = geo.spin_conn(p, i, j, k);
            if (w != 0.0) col -= w * sigma.col(p, k);
          }
        }
        out.set(p, i, j, col);
      }
  }
  return out;
}

inline SpinorOneForm dirac_on_spinor_oneforms(const MetricGeometry& geo,
                                              const SpinorOneForm& sigma) {
  SpinorTwoIndex grad = covariant_derivative_spinor_oneform(geo, sigma);
  SpinorOneForm out(geo.grid(), sigma.rep, geo.m);
  out.twist = sigma.twist;
  for (long p = 0; p < geo.total(); ++p)
    for (int j = 0; j < geo.m; ++j) {
      CVec sum = CVec::Zero(sigma.d());
      for (int i = 0; i < geo.m; ++i)
        sum += sigma.rep->gamma[i] * grad.at(p, i, j);
      out.set_col(p, j, sum);
    }
  return out;
}

// --- curvature ---

struct CurvatureField {
  TorusGrid grid;
  int m = 0;
  std::vector<double> frame;  // R_ijkl in frame components
  std::vector<double> ricci;  // Ric_jk in frame components

  double at(long p, int i, int j, int k, int l) const {
    return frame[(((p * m + i) * m + j) * m + k) * m + l];
  }
  double ric(long p, int j, int k) const { return ricci[(p * m + j) * m + k]; }
};

inline CurvatureField curvature(const MetricGeometry& geo) {
  const int m = geo.m;
  const TorusGrid& grid = geo.grid();
  const long n = grid.total();
  CurvatureField out;
  out.grid = grid;
  out.m = m;
  out.frame.assign(n * m * m * m * m, 0.0);
  out.ricci.assign(n * m * m, 0.0);
  if (geo.G.flat) return out;

  std::vector<std::vector<double>> dgam(m);
  for (int a = 0; a < m; ++a)
    dgam[a] = spectral_derivative_real(grid, geo.gamma, m * m * m, a);

  for (long p = 0; p < n; ++p) {
    RMat e = geo.E.mat(p);
    RMat ge = geo.G.mat(p) * e;
    // coordinate components R^d_abc of R(d_a, d_b) d_c
    std::vector<double> rc(m * m * m * m, 0.0);
    for (int d = 0; d < m; ++d)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) {
            double val = dgam[a][((p * m + d) * m + b) * m + c] -
                         dgam[b][((p * m + d) * m + a) * m + c];
            for (int ee = 0; ee < m; ++ee) {
              val += geo.christoffel(p, d, a, ee) * geo.christoffel(p, ee, b, c);
              val -= geo.christoffel(p, d, b, ee) * geo.christoffel(p, ee, a, c);
            }
            rc[((d * m + a) * m + b) * m + c] = val;
          }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            double sum = 0.0;
            for (int a = 0; a < m; ++a)
              for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                  for (int d = 0; d < m; ++d)
                    sum += e(a, i) * e(b, j) * e(c, k) * ge(d, l) *
                           rc[((d * m + a) * m + b) * m + c];
            out.frame[(((p * m + i) * m + j) * m + k) * m + l] = sum;
          }
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double sum = 0.0;
        for (int i = 0; i < m; ++i) sum += out.at(p, i, j, k, i);
        out.ricci[(p * m + j) * m + k] = sum;
      }
  }
  return out;
}

// Einstein operator Delta_E h = nabla*nabla h - 2 Rcirc h with
// (Rcirc h)(X,Y) = h(R_{e_i,X} Y, e_i).
inline SymTensorField einstein_operator(const MetricGeometry& geo,
                                        const CurvatureField& R,
                                        const SymTensorField& h) {
  const int m = geo.m;
  const TorusGrid& grid = geo.grid();
  const long n = grid.total();

  std::vector<double> T = covariant_derivative_symtensor(geo, h);
  std::vector<std::vector<double>> dT(m);
  for (int a = 0; a < m; ++a)
    dT[a] = spectral_derivative_real(grid, T, m * m * m, a);

  SymTensorField out(grid, m);
  for (long p = 0; p < n; ++p) {
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        // nabla*nabla h = -g^{aa'} (nabla^2 h)_{a a' b c}
        double sum = 0.0;
        for (int a = 0; a < m; ++a)
          for (int a2 = 0; a2 < m; ++a2) {
            double second = dT[a][((p * m + a2) * m + b) * m + c];
            for (int e = 0; e < m; ++e) {
              second -= geo.christoffel(p, e, a, a2) * T[((p * m + e) * m + b) * m + c];
              second -= geo.christoffel(p, e, a, b) * T[((p * m + a2) * m + e) * m + c];
              second -= geo.christoffel(p, e, a, c) * T[((p * m + a2) * m + b) * m + e];
            }
            sum -= geo.Ginv[(p * m + a) * m + a2] * second;
          }
        out.at(p, b, c) = sum;
      }
    if (!geo.G.flat) {
      RMat e = geo.E.mat(p);
      RMat htilde = e.transpose() * h.mat(p) * e;
      RMat rh = RMat::Zero(m, m);
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          double sum = 0.0;
          for (int i = 0; i < m; ++i)
            for (int l = 0; l < m; ++l) sum += R.at(p, i, j, k, l) * htilde(l, i);
          rh(j, k) = sum;
        }
      RMat einv = geo.G.mat(p) * e;  // E^{-1} = G^{1/2}
      RMat rh_coord = einv.transpose() * rh * einv;
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) out.at(p, b, c) -= 2.0 * rh_coord(b, c);
    }
  }
  return out;
}

inline SymTensorField einstein_operator(const MetricGeometry& geo,
                                        const SymTensorField& h) {
  CurvatureField R = curvature(geo);
  return einstein_operator(geo, R, h);
}

// R_{e_i,e_j} phi = (1/4) R_ijkl g_k g_l phi, laid out like SpinorTwoIndex
inline SpinorTwoIndex curvature_spinor(const MetricGeometry& geo,
                                       const CurvatureField& R,
                                       const SpinorField& phi) {
  const int m = geo.m;
  const int d = phi.d();
  SpinorTwoIndex out;
  out.grid = geo.grid();
  out.rep = phi.rep;
  out.m = m;
  out.c.assign(geo.total() * m * m * d, cplx(0, 0));
  if (geo.G.flat) return out;
  std::vector<Mat> prod = detail::gamma_products(*phi.rep);
  for (long p = 0; p < geo.total(); ++p) {
    CVec ph = phi.vec(p);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        CVec sum = CVec::Zero(d);
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            double r = R.at(p, i, j, k, l);
            if (r != 0.0) sum += 0.25 * r * (prod[k * m + l] * ph);
          }
        out.set(p, i, j, sum);
      }
  }
  return out;
}

// hessian of a scalar, (nabla df)_bc
inline SymTensorField hessian_scalar(const MetricGeometry& geo,
                                     const ScalarField& f) {
  const int m = geo.m;
  const TorusGrid& grid = geo.grid();
  SymTensorField out(grid, m);
  std::vector<std::vector<double>> df(m);
  for (int a = 0; a < m; ++a) df[a] = spectral_derivative_real(grid, f.v, 1, a);
  std::vector<std::vector<double>> ddf(m);
  for (int a = 0; a < m; ++a) ddf[a] = spectral_derivative_real(grid, df[a], 1, a);
  // mixed second derivatives
  std::vector<std::vector<double>> mixed(m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      mixed[a * m + b] = (a == b) ? ddf[a] : spectral_derivative_real(grid, df[a], 1, b);
  for (long p = 0; p < geo.total(); ++p)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double val = mixed[b * m + c][p];
        for (int e = 0; e < m; ++e)
          val -= geo.christoffel(p, e, b, c) * df[e][p];
        out.at(p, b, c) = val;
      }
  return out;
}

}  // namespace spingeo
