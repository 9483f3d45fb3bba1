#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spingeo/clifford.hpp"
#include "spingeo/fft.hpp"
#include "spingeo/grid.hpp"

namespace spingeo {

struct ScalarField {
  TorusGrid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const TorusGrid& g) : grid(g), v(g.total(), 0.0) {}
  double& at(long p) { return v[p]; }
  double at(long p) const { return v[p]; }
};

// Vector and one-form fields share the layout v[p*m + a]; which one a value
// is depends on the slot it is used in.
struct VectorField {
  TorusGrid grid;
  int m = 0;
  std::vector<double> v;

  VectorField() = default;
  VectorField(const TorusGrid& g, int m_) : grid(g), m(m_), v(g.total() * m_, 0.0) {}
  double& at(long p, int a) { return v[p * m + a]; }
  double at(long p, int a) const { return v[p * m + a]; }
  RVec vec(long p) const { return Eigen::Map<const RVec>(v.data() + p * m, m); }
  void set(long p, const RVec& x) {
    for (int a = 0; a < m; ++a) v[p * m + a] = x[a];
  }
};

using OneFormField = VectorField;

struct SymTensorField {
  TorusGrid grid;
  int m = 0;
  std::vector<double> v;  // v[p*m*m + a*m + b], kept symmetric

  SymTensorField() = default;
  SymTensorField(const TorusGrid& g, int m_)
      : grid(g), m(m_), v(g.total() * m_ * m_, 0.0) {}
  double& at(long p, int a, int b) { return v[(p * m + a) * m + b]; }
  double at(long p, int a, int b) const { return v[(p * m + a) * m + b]; }
  RMat mat(long p) const {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(v.data() + p * m * m,
                                                            m, m);
  }
  void set(long p, const RMat& x) {
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) v[(p * m + a) * m + b] = x(a, b);
  }
  double symmetry_defect() const {
    double worst = 0.0;
    for (long p = 0; p < grid.total(); ++p)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < a; ++b)
          worst = std::max(worst, std::abs(at(p, a, b) - at(p, b, a)));
    return worst;
  }
};

struct MetricField : SymTensorField {
  bool flat = false;

  MetricField() = default;
  MetricField(const TorusGrid& g, int m_) : SymTensorField(g, m_) {}

  static MetricField constant(const TorusGrid& g, const RMat& G0) {
    MetricField f(g, static_cast<int>(G0.rows()));
    for (long p = 0; p < g.total(); ++p) f.set(p, G0);
    f.flat = true;
    return f;
  }

  void validate() const {
    if (symmetry_defect() > 1e-12) throw std::invalid_argument("metric not symmetric");
    for (long p = 0; p < grid.total(); ++p) {
      Eigen::SelfAdjointEigenSolver<RMat> es(mat(p));
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("metric not positive definite");
    }
  }
};

struct FrameField {
  TorusGrid grid;
  int m = 0;
  std::vector<double> e;  // columns of E(x), e[(p*m + a)*m + i] = E_{a i}

  FrameField() = default;
  FrameField(const TorusGrid& g, int m_) : grid(g), m(m_), e(g.total() * m_ * m_, 0.0) {}
  double at(long p, int a, int i) const { return e[(p * m + a) * m + i]; }
  RMat mat(long p) const {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(e.data() + p * m * m,
                                                            m, m);
  }
  void set(long p, const RMat& x) {
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < m; ++i) e[(p * m + a) * m + i] = x(a, i);
  }
};

// Spinor components relative to a lifted orthonormal frame. A twist phase
// theta of unit modulus makes the field quasi-periodic across the first
// axis seam; the stored values are the field samples.
struct SpinorField {
  TorusGrid grid;
  std::shared_ptr<const GammaRep> rep;
  std::vector<cplx> c;
  cplx twist = cplx(1.0, 0.0);

  SpinorField() = default;
  SpinorField(const TorusGrid& g, std::shared_ptr<const GammaRep> r)
      : grid(g), rep(std::move(r)), c(g.total() * rep->d, cplx(0, 0)) {}

  int d() const { return rep->d; }
  double twist_angle() const { return std::arg(twist); }
  CVec vec(long p) const { return Eigen::Map<const CVec>(c.data() + p * rep->d, rep->d); }
  void set(long p, const CVec& x) {
    for (int k = 0; k < rep->d; ++k) c[p * rep->d + k] = x[k];
  }
  cplx& at(long p, int k) { return c[p * rep->d + k]; }
  cplx at(long p, int k) const { return c[p * rep->d + k]; }
};

// Section of (spinors) x (one-forms) in frame components; column j at a
// point is the spinor paired with the j-th coframe vector.
struct SpinorOneForm {
  TorusGrid grid;
  std::shared_ptr<const GammaRep> rep;
  int m = 0;
  std::vector<cplx> c;  // c[(p*m + j)*d + k]
  cplx twist = cplx(1.0, 0.0);

  SpinorOneForm() = default;
  SpinorOneForm(const TorusGrid& g, std::shared_ptr<const GammaRep> r, int m_)
      : grid(g), rep(std::move(r)), m(m_), c(g.total() * m_ * rep->d, cplx(0, 0)) {}

  int d() const { return rep->d; }
  CVec col(long p, int j) const {
    return Eigen::Map<const CVec>(c.data() + (p * m + j) * rep->d, rep->d);
  }
  void set_col(long p, int j, const CVec& x) {
    for (int k = 0; k < rep->d; ++k) c[(p * m + j) * rep->d + k] = x[k];
  }
};

inline double max_abs(const std::vector<double>& v) {
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x));
  return worst;
}

inline double max_abs(const std::vector<cplx>& v) {
  double worst = 0.0;
  for (const cplx& x : v) worst = std::max(worst, std::abs(x));
  return worst;
}

}  // namespace spingeo
