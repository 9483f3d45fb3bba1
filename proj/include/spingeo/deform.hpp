#pragma once

#include <chrono>
#include <sstream>

#include "spingeo/geometry.hpp"
#include "spingeo/report.hpp"

namespace spingeo {

// Deformation-theoretic maps pairing symmetric 2-tensors with spinor-valued
// one-forms, and the commutation identities between them. The left-hand
// sides of the identity checks only use wang_map and the twisted Dirac
// operator; the right-hand sides only use kappa, the divergence, the
// Einstein operator and the spinor curvature, so the two sides never share
// an intermediate.

namespace detail {

// frame components (nabla_{e_i} h)(e_k, e_j), laid out [((p*m+i)*m+k)*m+j]
inline std::vector<double> frame_nabla_h(const MetricGeometry& geo,
                                         const SymTensorField& h) {
  const int m = geo.m;
  std::vector<double> T = covariant_derivative_symtensor(geo, h);
  std::vector<double> out(geo.total() * m * m * m, 0.0);
  for (long p = 0; p < geo.total(); ++p) {
    RMat e = geo.E.mat(p);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) {
          double sum = 0.0;
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
              for (int c = 0; c < m; ++c)
                sum += e(a, i) * e(b, k) * e(c, j) * T[((p * m + a) * m + b) * m + c];
          out[((p * m + i) * m + k) * m + j] = sum;
        }
  }
  return out;
}

}  // namespace detail

// kappa(h) = (1/4) sum_{i != j} (nabla_{e_i} h)(. , e_j) g_i g_j phi
inline SpinorOneForm kappa(const MetricGeometry& geo, const SpinorField& phi,
                           const SymTensorField& h) {
  const int m = geo.m;
  if (phi.rep->n != m || h.m != m || !(phi.grid == geo.grid()))
    throw std::invalid_argument("kappa: grid/rep mismatch");
  std::vector<double> nh = detail::frame_nabla_h(geo, h);
  std::vector<Mat> prod = detail::gamma_products(*phi.rep);
  SpinorOneForm out(geo.grid(), phi.rep, m);
  out.twist = phi.twist;
  for (long p = 0; p < geo.total(); ++p) {
    CVec ph = phi.vec(p);
    for (int k = 0; k < m; ++k) {
      CVec col = CVec::Zero(phi.d());
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (i == j) continue;
          double w = nh[((p * m + i) * m + k) * m + j];
          if (w != 0.0) col += 0.25 * w * (prod[i * m + j] * ph);
        }
      out.set_col(p, k, col);
    }
  }
  return out;
}

// Wang map W_{g,phi}(h) = (X -> sum_j h(X, e_j) e_j . phi)
inline SpinorOneForm wang_map(const MetricGeometry& geo, const SpinorField& phi,
                              const SymTensorField& h) {
  const int m = geo.m;
  if (phi.rep->n != m || h.m != m || !(phi.grid == geo.grid()))
    throw std::invalid_argument("wang_map: grid/rep mismatch");
  SpinorOneForm out(geo.grid(), phi.rep, m);
  out.twist = phi.twist;
  for (long p = 0; p < geo.total(); ++p) {
    RMat e = geo.E.mat(p);
    RMat ht = e.transpose() * h.mat(p) * e;
    CVec ph = phi.vec(p);
    for (int k = 0; k < m; ++k) {
      CVec col = CVec::Zero(phi.d());
      for (int j = 0; j < m; ++j)
        if (ht(k, j) != 0.0) col += ht(k, j) * (phi.rep->gamma[j] * ph);
      out.set_col(p, k, col);
    }
  }
  return out;
}

// Dirac operator on spinor-valued one-forms with the product connection.
inline SpinorOneForm dirac_twisted(const MetricGeometry& geo,
                                   const SpinorOneForm& sigma) {
  return dirac_on_spinor_oneforms(geo, sigma);
}

namespace detail {

inline ResidualRecord residual_record(const MetricGeometry& geo,
                                      const std::string& id,
                                      const SpinorOneForm& lhs,
                                      const SpinorOneForm& rhs,
                                      std::chrono::steady_clock::time_point t0) {
  SpinorOneForm diff = lhs;
  for (size_t i = 0; i < diff.c.size(); ++i) diff.c[i] -= rhs.c[i];
  double num = l2_norm(geo, diff);
  double den = l2_norm(geo, lhs);
  ResidualRecord rec;
  rec.id = id;
  std::ostringstream gs;
  for (size_t a = 0; a < geo.grid().sizes.size(); ++a)
    gs << (a ? "x" : "") << geo.grid().sizes[a];
  rec.grid = gs.str();
  rec.residual_abs = num;
  rec.residual_rel = den > 1e-10 ? num / den : num;
  rec.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return rec;
}

}  // namespace detail

// D^{T*M} W(h) = 4 kappa(h) + phi (x) div h, for parallel phi.
inline ResidualRecord check_wang_first_order(const MetricGeometry& geo,
                                             const SpinorField& phi,
                                             const SymTensorField& h) {
  auto t0 = std::chrono::steady_clock::now();
  SpinorOneForm grad = covariant_derivative_spinor(geo, phi);
  if (max_abs(grad.c) > 1e-10)
    throw std::invalid_argument("check_wang_first_order: spinor not parallel");

  SpinorOneForm lhs = dirac_twisted(geo, wang_map(geo, phi, h));

  SpinorOneForm rhs = kappa(geo, phi, h);
  for (auto& x : rhs.c) x *= 4.0;
  OneFormField div = divergence_symtensor(geo, h);
  for (long p = 0; p < geo.total(); ++p) {
    RMat e = geo.E.mat(p);
    CVec ph = phi.vec(p);
    for (int k = 0; k < geo.m; ++k) {
      double divk = 0.0;
      for (int b = 0; b < geo.m; ++b) divk += div.at(p, b) * e(b, k);
      CVec col = rhs.col(p, k) + divk * ph;
      rhs.set_col(p, k, col);
    }
  }
  return detail::residual_record(geo, "wang-first-order", lhs, rhs, t0);
}

// The same commutation formula for arbitrary spinors, with the two extra
// terms -2 nabla_{h#(X)} phi - h#(X) . D phi.
inline ResidualRecord check_wang_general(const MetricGeometry& geo,
                                         const SpinorField& phi,
                                         const SymTensorField& h) {
  auto t0 = std::chrono::steady_clock::now();
  const int m = geo.m;
  SpinorOneForm lhs = dirac_twisted(geo, wang_map(geo, phi, h));

  SpinorOneForm rhs = kappa(geo, phi, h);
  for (auto& x : rhs.c) x *= 4.0;
  OneFormField div = divergence_symtensor(geo, h);
  SpinorOneForm grad = covariant_derivative_spinor(geo, phi);
  SpinorField dphi = dirac(geo, phi);
  for (long p = 0; p < geo.total(); ++p) {
    RMat e = geo.E.mat(p);
    RMat ht = e.transpose() * h.mat(p) * e;
    CVec ph = phi.vec(p);
    CVec dp = dphi.vec(p);
    for (int k = 0; k < m; ++k) {
      double divk = 0.0;
      for (int b = 0; b < m; ++b) divk += div.at(p, b) * e(b, k);
      CVec col = rhs.col(p, k) + divk * ph;
      for (int j = 0; j < m; ++j) {
        if (ht(j, k) == 0.0) continue;
        col -= 2.0 * ht(j, k) * grad.col(p, j);
        col -= ht(j, k) * (phi.rep->gamma[j] * dp);
      }
      rhs.set_col(p, k, col);
    }
  }
  return detail::residual_record(geo, "wang-general", lhs, rhs, t0);
}

// (D^{T*M})^2 W(h) = W(Delta_E h) - 2 sum_l W_{nabla_l phi}(nabla_l h)
//                    + W_{D^2 phi}(h) - 2 (X -> sum_l h#(e_l) . R_{X,e_l} phi)
inline ResidualRecord check_wang_second_order(const MetricGeometry& geo,
                                              const SpinorField& phi,
                                              const SymTensorField& h) {
  auto t0 = std::chrono::steady_clock::now();
  const int m = geo.m;
  const int d = phi.d();
  SpinorOneForm lhs = dirac_twisted(geo, dirac_twisted(geo, wang_map(geo, phi, h)));

  SpinorOneForm rhs = wang_map(geo, phi, einstein_operator(geo, h));

  SpinorOneForm grad = covariant_derivative_spinor(geo, phi);
  std::vector<double> nh = detail::frame_nabla_h(geo, h);
  SpinorField d2phi = dirac(geo, dirac(geo, phi));
  SpinorOneForm wd2 = wang_map(geo, d2phi, h);
  CurvatureField R = curvature(geo);
  SpinorTwoIndex rphi = curvature_spinor(geo, R, phi);

  for (long p = 0; p < geo.total(); ++p) {
    RMat e = geo.E.mat(p);
    RMat ht = e.transpose() * h.mat(p) * e;
    for (int k = 0; k < m; ++k) {
      CVec col = rhs.col(p, k) + wd2.col(p, k);
      for (int l = 0; l < m; ++l) {
        // W_{nabla_l phi}(nabla_l h) column k
        CVec gl = grad.col(p, l);
        for (int j = 0; j < m; ++j) {
          double w = nh[((p * m + l) * m + k) * m + j];
          if (w != 0.0) col -= 2.0 * w * (phi.rep->gamma[j] * gl);
        }
        // curvature term: h#(e_l) = sum_j ht(j,l) e_j
        CVec rk = rphi.at(p, k, l);
        for (int j = 0; j < m; ++j)
          if (ht(j, l) != 0.0) col -= 2.0 * ht(j, l) * (phi.rep->gamma[j] * rk);
      }
      rhs.set_col(p, k, col);
    }
  }
  (void)d;
  return detail::residual_record(geo, "wang-second-order", lhs, rhs, t0);
}

}  // namespace spingeo
