#include <catch2/catch_amalgamated.hpp>

#include "spingeo/geometry.hpp"
#include "spingeo/random_fields.hpp"
#include "spingeo/rng.hpp"

using namespace spingeo;

namespace {

constexpr double kTau = 2.0 * M_PI;

// single-mode scalar A sin(2 pi k.x + p0) with analytic derivatives
struct Mode {
  std::vector<int> k;
  double amp = 1.0;
  double phase = 0.0;

  double arg(const std::vector<double>& x) const {
    double s = phase;
    for (size_t a = 0; a < k.size(); ++a) s += kTau * k[a] * x[a];
    return s;
  }
  double val(const std::vector<double>& x) const { return amp * std::sin(arg(x)); }
  double d(const std::vector<double>& x, int a) const {
    return amp * kTau * k[a] * std::cos(arg(x));
  }
  double dd(const std::vector<double>& x, int a, int b) const {
    return -amp * kTau * kTau * k[a] * k[b] * std::sin(arg(x));
  }
};

ScalarField sample(const TorusGrid& grid, const Mode& mode) {
  ScalarField f(grid);
  std::vector<double> x;
  for (long p = 0; p < grid.total(); ++p) {
    grid.coords(p, x);
    f.at(p) = mode.val(x);
  }
  return f;
}

TorusGrid grid2(int n) { return TorusGrid({n, n}); }

}  // namespace

TEST_CASE("spectral derivative basics") {
  TorusGrid g = grid2(16);
  ScalarField c(g);
  for (long p = 0; p < g.total(); ++p) c.at(p) = 3.25;
  auto dc = spectral_derivative_real(g, c.v, 1, 0);
  CHECK(max_abs(dc) < 1e-13);

  Mode mode{{1, 0}, 1.0, 0.0};  // sin(2 pi x1)
  ScalarField f = sample(g, mode);
  auto df = spectral_derivative_real(g, f.v, 1, 0);
  std::vector<double> x;
  double worst = 0.0;
  for (long p = 0; p < g.total(); ++p) {
    g.coords(p, x);
    worst = std::max(worst, std::abs(df[p] - kTau * std::cos(kTau * x[0])));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("mixed spectral derivatives commute") {
  TorusGrid g = grid2(16);
  CounterRng rng(42);
  ScalarField f = random_bandlimited_scalar(g, 3, rng);
  auto d0 = spectral_derivative_real(g, f.v, 1, 0);
  auto d01 = spectral_derivative_real(g, d0, 1, 1);
  auto d1 = spectral_derivative_real(g, f.v, 1, 1);
  auto d10 = spectral_derivative_real(g, d1, 1, 0);
  double worst = 0.0;
  for (long p = 0; p < g.total(); ++p)
    worst = std::max(worst, std::abs(d01[p] - d10[p]));
  CHECK(worst < 1e-10);
}

TEST_CASE("twisted spectral derivative") {
  // f(x) = e^{i (2 pi k + alpha) x} is quasi-periodic with twist e^{i alpha}
  TorusGrid g({16, 4});
  double alpha = 0.7;
  std::vector<cplx> f(g.total());
  for (long p = 0; p < g.total(); ++p) {
    double x = g.coord(p, 0);
    f[p] = std::exp(cplx(0, (kTau + alpha) * x));
  }
  auto df = spectral_derivative(g, f, 1, 0, alpha);
  double worst = 0.0;
  for (long p = 0; p < g.total(); ++p)
    worst = std::max(worst, std::abs(df[p] - cplx(0, kTau + alpha) * f[p]));
  CHECK(worst < 1e-10);
}

TEST_CASE("christoffels: flat, conformal closed form, compatibility") {
  TorusGrid g = grid2(32);

  MetricField flat = MetricField::constant(g, (RMat(2, 2) << 2.0, 0.3, 0.3, 1.0).finished());
  MetricGeometry geof = make_geometry(flat);
  CHECK(max_abs(geof.gamma) < 1e-12);

  Mode u{{1, 2}, 0.08, 0.3};
  MetricField G = conformal_metric(sample(g, u), 2);
  MetricGeometry geo = make_geometry(G);

  // Gamma^k_ij = d_j u delta_ik + d_i u delta_jk - d_k u delta_ij
  std::vector<double> x;
  double worst = 0.0;
  for (long p = 0; p < g.total(); ++p) {
    g.coords(p, x);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double want = (i == k ? u.d(x, j) : 0.0) + (j == k ? u.d(x, i) : 0.0) -
                        (i == j ? u.d(x, k) : 0.0);
          worst = std::max(worst, std::abs(geo.christoffel(p, k, i, j) - want));
        }
  }
  CHECK(worst < 1e-8);

  // metric compatibility nabla g = 0 on a generic perturbed metric
  CounterRng rng(7);
  MetricField Gp = perturbed_metric(g, 2, 2, rng, 0.1);
  MetricGeometry geop = make_geometry(Gp);
  std::vector<std::vector<double>> dG(2);
  for (int a = 0; a < 2; ++a)
    dG[a] = spectral_derivative_real(g, Gp.v, 4, a);
  worst = 0.0;
  for (long p = 0; p < g.total(); ++p)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          double val = dG[a][(p * 2 + b) * 2 + c];
          for (int e = 0; e < 2; ++e) {
            val -= geop.christoffel(p, e, a, b) * Gp.at(p, e, c);
            val -= geop.christoffel(p, e, a, c) * Gp.at(p, b, e);
          }
          worst = std::max(worst, std::abs(val));
        }
  CHECK(worst < 1e-8);
}

TEST_CASE("spin connection: flat, conformal closed form, antisymmetry") {
  TorusGrid g = grid2(32);
  MetricField flat = MetricField::constant(g, RMat::Identity(2, 2));
  CHECK(max_abs(make_geometry(flat).spin) == 0.0);

  Mode u{{0, 1}, 0.05, 1.1};
  MetricField G = conformal_metric(sample(g, u), 2);
  MetricGeometry geo = make_geometry(G);
  // w_ij(e_k) = e^{-u} (d_i u delta_kj - delta_ki d_j u)
  std::vector<double> x;
  double worst = 0.0;
  for (long p = 0; p < g.total(); ++p) {
    g.coords(p, x);
    double eu = std::exp(-u.val(x));
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double want = eu * ((k == j ? u.d(x, i) : 0.0) - (k == i ? u.d(x, j) : 0.0));
          worst = std::max(worst, std::abs(geo.spin_conn(p, k, i, j) - want));
        }
  }
  CHECK(worst < 1e-8);

  CounterRng rng(3);
  MetricGeometry geop = make_geometry(perturbed_metric(g, 2, 2, rng, 0.1));
  worst = 0.0;
  for (long p = 0; p < g.total(); ++p)
    for (int k = 0; k < 2; ++k) {
      RMat w = geop.spin_mat(p, k);
      worst = std::max(worst, (w + w.transpose()).norm());
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("covariant derivative of spinors") {
  TorusGrid g = grid2(16);
  auto rep = std::make_shared<const GammaRep>(build_rep(2));

  SECTION("constant components on a flat torus are parallel") {
    MetricGeometry geo = make_geometry(
        MetricField::constant(g, (RMat(2, 2) << 1.5, 0.2, 0.2, 0.9).finished()));
    SpinorField phi(g, rep);
    for (long p = 0; p < g.total(); ++p) phi.set(p, (CVec(2) << 1.0, cplx(0, 2)).finished());
    SpinorOneForm grad = covariant_derivative_spinor(geo, phi);
    CHECK(max_abs(grad.c) < 1e-12);
    SpinorField dphi = dirac(geo, phi);
    CHECK(max_abs(dphi.c) < 1e-12);
  }

  SECTION("oscillating spinor on a flat anisotropic torus") {
    MetricGeometry geo =
        make_geometry(MetricField::constant(g, (RMat(2, 2) << 4.0, 0.0, 0.0, 1.0).finished()));
    SpinorField phi(g, rep);
    CVec phi0 = (CVec(2) << 0.5, cplx(0.1, -0.7)).finished();
    for (long p = 0; p < g.total(); ++p)
      phi.set(p, std::exp(cplx(0, kTau * g.coord(p, 0))) * phi0);
    SpinorOneForm grad = covariant_derivative_spinor(geo, phi);
    // e_1 = (1/2) d_1, so nabla_{e_1} phi = (1/2)(2 pi i) phi
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p) {
      CVec want = cplx(0, M_PI) * phi.vec(p);
      worst = std::max(worst, (grad.col(p, 0) - want).norm());
      worst = std::max(worst, grad.col(p, 1).norm());
    }
    CHECK(worst < 1e-9);
    // D phi = g_1 nabla_{e_1} phi
    SpinorField dphi = dirac(geo, phi);
    worst = 0.0;
    for (long p = 0; p < g.total(); ++p) {
      CVec want = cplx(0, M_PI) * (rep->gamma[0] * phi.vec(p));
      worst = std::max(worst, (dphi.vec(p) - want).norm());
    }
    CHECK(worst < 1e-9);
  }

  SECTION("Leibniz rule against the frame derivative of the inner product") {
    CounterRng rng(19);
    MetricGeometry geo = make_geometry(perturbed_metric(g, 2, 2, rng, 0.1));
    SpinorField phi = random_bandlimited_spinor(g, rep, 2, rng);
    CounterRng rng2 = rng.split(5);
    SpinorField psi = random_bandlimited_spinor(g, rep, 2, rng2);
    SpinorOneForm gphi = covariant_derivative_spinor(geo, phi);
    SpinorOneForm gpsi = covariant_derivative_spinor(geo, psi);

    std::vector<cplx> ip(g.total());
    for (long p = 0; p < g.total(); ++p) ip[p] = psi.vec(p).dot(phi.vec(p));
    std::vector<std::vector<cplx>> dip(2);
    for (int a = 0; a < 2; ++a) dip[a] = spectral_derivative(g, ip, 1, a);

    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p) {
      RMat e = geo.E.mat(p);
      for (int i = 0; i < 2; ++i) {
        cplx lhs = e(0, i) * dip[0][p] + e(1, i) * dip[1][p];
        cplx rhs = psi.vec(p).dot(gphi.col(p, i)) + gpsi.col(p, i).dot(phi.vec(p));
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    CHECK(worst < 1e-8);
  }

  SECTION("Dirac operator is L2-symmetric") {
    TorusGrid gfine = grid2(32);
    CounterRng rng(23);
    MetricGeometry geo = make_geometry(perturbed_metric(gfine, 2, 2, rng, 0.08));
    SpinorField phi = random_bandlimited_spinor(gfine, rep, 2, rng);
    CounterRng rng2 = rng.split(9);
    SpinorField psi = random_bandlimited_spinor(gfine, rep, 2, rng2);
    cplx a = l2_inner(geo, dirac(geo, phi), psi);
    cplx b = l2_inner(geo, phi, dirac(geo, psi));
    CHECK(std::abs(a - b) < 1e-8);
  }
}

TEST_CASE("divergence of symmetric tensors") {
  TorusGrid g = grid2(16);
  MetricGeometry geo = make_geometry(MetricField::constant(g, RMat::Identity(2, 2)));

  SECTION("constant tensor") {
    SymTensorField h(g, 2);
    for (long p = 0; p < g.total(); ++p) h.set(p, (RMat(2, 2) << 1, 2, 2, -1).finished());
    CHECK(max_abs(divergence_symtensor(geo, h).v) < 1e-12);
  }

  SECTION("hessian against the spectral laplacian") {
    Mode f{{2, 1}, 0.8, 0.4};
    SymTensorField h = hessian_scalar(geo, sample(g, f));
    OneFormField div = divergence_symtensor(geo, h);
    // div(hess f)_b = -laplace(d_b f); for the single mode = (2 pi |k|)^2 d_b f
    double k2 = kTau * kTau * 5.0;
    std::vector<double> x;
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p) {
      g.coords(p, x);
      for (int b = 0; b < 2; ++b)
        worst = std::max(worst, std::abs(div.at(p, b) - k2 * f.d(x, b)));
    }
    CHECK(worst < 1e-8);
  }

  SECTION("pure trace tensor picks up minus the differential") {
    Mode f{{1, 1}, 0.5, 0.9};
    ScalarField fs = sample(g, f);
    SymTensorField h(g, 2);
    for (long p = 0; p < g.total(); ++p)
      h.set(p, fs.at(p) * RMat::Identity(2, 2));
    OneFormField div = divergence_symtensor(geo, h);
    std::vector<double> x;
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p) {
      g.coords(p, x);
      for (int b = 0; b < 2; ++b)
        worst = std::max(worst, std::abs(div.at(p, b) + f.d(x, b)));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("divergence adjoint") {
  TorusGrid g = grid2(16);
  CounterRng rng(31);

  SECTION("zero in, zero out") {
    MetricGeometry geo = make_geometry(MetricField::constant(g, RMat::Identity(2, 2)));
    OneFormField zero(g, 2);
    CHECK(max_abs(div_adjoint(geo, zero).v) == 0.0);
  }

  SECTION("randomized adjointness, flat and curved") {
    TorusGrid gfine = grid2(32);
    for (bool curved : {false, true}) {
      MetricGeometry geo =
          curved ? make_geometry(perturbed_metric(gfine, 2, 2, rng, 0.08))
                 : make_geometry(MetricField::constant(
                       gfine, (RMat(2, 2) << 1.3, 0.2, 0.2, 0.8).finished()));
      for (int trial = 0; trial < 20; ++trial) {
        CounterRng ra = rng.split(1000 + trial);
        CounterRng rb = rng.split(2000 + trial);
        OneFormField alpha = random_bandlimited_vector(gfine, 2, 2, ra);
        SymTensorField h = random_bandlimited_symtensor(gfine, 2, 2, rb);
        double lhs = l2_inner(geo, div_adjoint(geo, alpha), h);
        double rhs = l2_inner(geo, alpha, divergence_symtensor(geo, h));
        CHECK(std::abs(lhs - rhs) < 1e-8);
      }
    }
  }

  SECTION("Lie derivative identity") {
    // flat metric, single mode: L_{alpha#} g = 2 div* alpha
    MetricGeometry geo = make_geometry(
        MetricField::constant(g, (RMat(2, 2) << 1.0, 0.1, 0.1, 2.0).finished()));
    VectorField X = random_bandlimited_vector(g, 2, 1, rng);
    SymTensorField lhs = lie_derivative_metric(geo, X);
    SymTensorField rhs = div_adjoint(geo, lower_index(geo, X));
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p)
      worst = std::max(worst, (lhs.mat(p) - 2.0 * rhs.mat(p)).norm());
    CHECK(worst < 1e-8);

    // curved case: X bandlimited, so both sides only differentiate
    // bandlimited data
    MetricGeometry geoc = make_geometry(perturbed_metric(g, 2, 2, rng, 0.1));
    VectorField Xc = random_bandlimited_vector(g, 2, 2, rng);
    SymTensorField lhsc = lie_derivative_metric(geoc, Xc);
    SymTensorField rhsc = div_adjoint(geoc, lower_index(geoc, Xc));
    worst = 0.0;
    for (long p = 0; p < g.total(); ++p)
      worst = std::max(worst, (lhsc.mat(p) - 2.0 * rhsc.mat(p)).norm());
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("lie derivative of the metric") {
  TorusGrid g = grid2(16);
  MetricGeometry geo = make_geometry(MetricField::constant(g, RMat::Identity(2, 2)));

  // constant fields are Killing on the flat torus
  VectorField X(g, 2);
  for (long p = 0; p < g.total(); ++p) X.set(p, (RVec(2) << 0.7, -0.2).finished());
  CHECK(max_abs(lie_derivative_metric(geo, X).v) < 1e-13);

  // gradient fields: L_{grad f} delta = 2 hess f
  Mode f{{1, 2}, 0.6, 0.2};
  ScalarField fs = sample(g, f);
  VectorField gradf(g, 2);
  std::vector<double> x;
  for (long p = 0; p < g.total(); ++p) {
    g.coords(p, x);
    gradf.set(p, (RVec(2) << f.d(x, 0), f.d(x, 1)).finished());
  }
  SymTensorField lg = lie_derivative_metric(geo, gradf);
  SymTensorField hf = hessian_scalar(geo, fs);
  double worst = 0.0;
  for (long p = 0; p < g.total(); ++p)
    worst = std::max(worst, (lg.mat(p) - 2.0 * hf.mat(p)).norm());
  CHECK(worst < 1e-8);
}

TEST_CASE("curvature") {
  TorusGrid g = grid2(32);

  SECTION("flat metric has zero curvature") {
    MetricGeometry geo = make_geometry(
        MetricField::constant(g, (RMat(2, 2) << 2.0, 0.5, 0.5, 1.0).finished()));
    CurvatureField R = curvature(geo);
    CHECK(max_abs(R.frame) == 0.0);
  }

  SECTION("conformal torus Gauss curvature") {
    Mode u{{1, 1}, 0.05, 0.6};
    MetricField G = conformal_metric(sample(g, u), 2);
    MetricGeometry geo = make_geometry(G);
    CurvatureField R = curvature(geo);
    std::vector<double> x;
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p) {
      g.coords(p, x);
      double lap = u.dd(x, 0, 0) + u.dd(x, 1, 1);
      double kexp = -std::exp(-2.0 * u.val(x)) * lap;
      worst = std::max(worst, std::abs(R.at(p, 0, 1, 1, 0) - kexp));
    }
    CHECK(worst < 1e-6);
  }

  SECTION("first Bianchi identity on a generic metric") {
    CounterRng rng(13);
    MetricGeometry geo = make_geometry(perturbed_metric(g, 2, 2, rng, 0.1));
    CurvatureField R = curvature(geo);
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              worst = std::max(worst, std::abs(R.at(p, i, j, k, l) + R.at(p, j, k, i, l) +
                                               R.at(p, k, i, j, l)));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("einstein operator on a flat torus is the rough laplacian") {
  TorusGrid g = grid2(16);
  MetricGeometry geo = make_geometry(MetricField::constant(g, RMat::Identity(2, 2)));
  Mode f{{1, 2}, 0.4, 0.0};
  ScalarField fs = sample(g, f);
  SymTensorField h(g, 2);
  for (long p = 0; p < g.total(); ++p)
    h.set(p, (RMat(2, 2) << fs.at(p), 0.3 * fs.at(p), 0.3 * fs.at(p), -fs.at(p)).finished());
  SymTensorField lhs = einstein_operator(geo, h);
  double k2 = kTau * kTau * 5.0;
  double worst = 0.0;
  for (long p = 0; p < g.total(); ++p)
    worst = std::max(worst, (lhs.mat(p) - k2 * h.mat(p)).norm());
  CHECK(worst < 1e-8);
}

TEST_CASE("spinor curvature") {
  TorusGrid g = grid2(32);
  auto rep = std::make_shared<const GammaRep>(build_rep(2));
  CounterRng rng(17);

  SECTION("flat metric") {
    MetricGeometry geo = make_geometry(MetricField::constant(g, RMat::Identity(2, 2)));
    SpinorField phi = random_bandlimited_spinor(g, rep, 2, rng);
    SpinorTwoIndex R = curvature_spinor(geo, curvature(geo), phi);
    CHECK(max_abs(R.c) == 0.0);
  }

  SECTION("commutator of second covariant derivatives") {
    MetricGeometry geo = make_geometry(perturbed_metric(g, 2, 2, rng, 0.08));
    CurvatureField R = curvature(geo);
    SpinorField phi = random_bandlimited_spinor(g, rep, 2, rng);
    SpinorTwoIndex Rphi = curvature_spinor(geo, R, phi);

    SpinorOneForm grad = covariant_derivative_spinor(geo, phi);
    SpinorTwoIndex second = covariant_derivative_spinor_oneform(geo, grad);
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          CVec comm = second.at(p, i, j) - second.at(p, j, i);
          worst = std::max(worst, (comm - Rphi.at(p, i, j)).norm());
        }
    CHECK(worst < 1e-6);
  }

  SECTION("Ricci contraction identity") {
    MetricGeometry geo = make_geometry(perturbed_metric(g, 2, 2, rng, 0.08));
    CurvatureField R = curvature(geo);
    SpinorField phi = random_bandlimited_spinor(g, rep, 2, rng);
    SpinorTwoIndex Rphi = curvature_spinor(geo, R, phi);
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p)
      for (int j = 0; j < 2; ++j) {
        CVec lhs = CVec::Zero(2);
        for (int i = 0; i < 2; ++i) lhs += rep->gamma[i] * Rphi.at(p, i, j);
        CVec rhs = CVec::Zero(2);
        for (int k = 0; k < 2; ++k) rhs += 0.5 * R.ric(p, j, k) * (rep->gamma[k] * phi.vec(p));
        worst = std::max(worst, (lhs - rhs).norm());
      }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("spectral convergence under refinement") {
  // Gauss curvature residual on the conformal torus drops by orders of
  // magnitude from 16^2 to 32^2 for fixed bandlimited data
  Mode u{{1, 1}, 0.1, 0.25};
  auto residual = [&](int n) {
    TorusGrid g = grid2(n);
    MetricField G = conformal_metric(sample(g, u), 2);
    CurvatureField R = curvature(make_geometry(G));
    std::vector<double> x;
    double worst = 0.0;
    for (long p = 0; p < g.total(); ++p) {
      g.coords(p, x);
      double kexp = -std::exp(-2.0 * u.val(x)) * (u.dd(x, 0, 0) + u.dd(x, 1, 1));
      worst = std::max(worst, std::abs(R.at(p, 0, 1, 1, 0) - kexp));
    }
    return worst;
  };
  double coarse = residual(16);
  double fine = residual(32);
  CHECK(fine < coarse / 100.0);
}
