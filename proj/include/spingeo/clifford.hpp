#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace spingeo {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

enum class RepVariant { Sigma, SigmaSharp };

// Irreducible complex Clifford representation in the skew convention
//   g_i g_j + g_j g_i = -2 delta_ij,  g_i^dag = -g_i,
// normalized so that omega = epsilon_n g_1...g_n satisfies omega^2 = Id,
// and omega = +Id for the Sigma variant in odd dimension.
struct GammaRep {
  int n = 0;
  int d = 0;
  RepVariant variant = RepVariant::Sigma;
  cplx epsilon;
  std::vector<Mat> gamma;
  Mat omega;
};

inline cplx epsilon_n(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0:
    case 3:
      return cplx(1.0, 0.0);
    case 1:
      return cplx(0.0, -1.0);
    default:
      return cplx(0.0, 1.0);
  }
}

namespace detail {

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat pauli(int k) {
  Mat s(2, 2);
  switch (k) {
    case 1:
      s << 0, 1, 1, 0;
      break;
    case 2:
      s << 0, cplx(0, -1), cplx(0, 1), 0;
      break;
    default:
      s << 1, 0, 0, -1;
      break;
  }
  return s;
}

// gammas of the even-dimensional representation, built by doubling:
// from {g_i} for n-2 produce {s1 x g_i, i s2 x 1, i s3 x 1}.
inline std::vector<Mat> even_gammas(int n) {
  const cplx iu(0.0, 1.0);
  if (n == 2) return {iu * pauli(1), iu * pauli(2)};
  std::vector<Mat> prev = even_gammas(n - 2);
  int dprev = static_cast<int>(prev[0].rows());
  Mat id = Mat::Identity(dprev, dprev);
  std::vector<Mat> out;
  out.reserve(n);
  for (const Mat& g : prev) out.push_back(kron(pauli(1), g));
  out.push_back(kron(iu * pauli(2), id));
  out.push_back(kron(iu * pauli(3), id));
  return out;
}

}  // namespace detail

inline GammaRep build_rep(int n, RepVariant variant = RepVariant::Sigma) {
  if (n < 1) throw std::invalid_argument("build_rep: n must be positive");
  if (variant == RepVariant::SigmaSharp && n % 2 == 0)
    throw std::invalid_argument("build_rep: SigmaSharp requires odd n");

  GammaRep rep;
  rep.n = n;
  rep.variant = variant;
  rep.epsilon = epsilon_n(n);

  const cplx iu(0.0, 1.0);
  if (n == 1) {
    rep.gamma = {iu * Mat::Identity(1, 1)};
  } else if (n % 2 == 0) {
    rep.gamma = detail::even_gammas(n);
  } else {
    // odd n: extend the even rep by a multiple of the volume element,
    // with the sign fixed by omega = +Id
    rep.gamma = detail::even_gammas(n - 1);
    int d = static_cast<int>(rep.gamma[0].rows());
    Mat vol = Mat::Identity(d, d);
    for (const Mat& g : rep.gamma) vol = vol * g;
    int k = (n - 1) / 2;
    cplx c = (k % 2 == 1) ? cplx(1.0, 0.0) : iu;
    Mat gn = c * vol;
    Mat omega = rep.epsilon * vol * gn;
    if (std::abs(omega(0, 0).real() + 1.0) < 0.5) gn = -gn;
    rep.gamma.push_back(gn);
  }

  if (variant == RepVariant::SigmaSharp)
    for (Mat& g : rep.gamma) g = -g;

  rep.d = static_cast<int>(rep.gamma[0].rows());
  rep.omega = rep.epsilon * Mat::Identity(rep.d, rep.d);
  for (const Mat& g : rep.gamma) rep.omega = rep.omega * g;
  return rep;
}

// Sum v_i g_i as a matrix.
inline Mat clifford_matrix(const GammaRep& rep, const RVec& v) {
  if (v.size() != rep.n) throw std::invalid_argument("clifford_matrix: dim mismatch");
  Mat out = Mat::Zero(rep.d, rep.d);
  for (int i = 0; i < rep.n; ++i) out += v[i] * rep.gamma[i];
  return out;
}

inline CVec clifford_mul(const GammaRep& rep, const RVec& v, const CVec& phi) {
  if (phi.size() != rep.d || v.size() != rep.n)
    throw std::invalid_argument("clifford_mul: dim mismatch");
  CVec out = CVec::Zero(rep.d);
  for (int i = 0; i < rep.n; ++i)
    if (v[i] != 0.0) out += v[i] * (rep.gamma[i] * phi);
  return out;
}

// Spin lift of an antisymmetric matrix: (1/4) sum A_jk g_j g_k.
inline Mat spin_generator(const GammaRep& rep, const RMat& A,
                          double tol = 1e-10) {
  if (A.rows() != rep.n || A.cols() != rep.n)
    throw std::invalid_argument("spin_generator: dim mismatch");
  if ((A + A.transpose()).norm() > tol * (1.0 + A.norm()))
    throw std::invalid_argument("spin_generator: matrix not antisymmetric");
  Mat out = Mat::Zero(rep.d, rep.d);
  for (int j = 0; j < rep.n; ++j)
    for (int k = 0; k < rep.n; ++k)
      if (A(j, k) != 0.0) out += 0.25 * A(j, k) * (rep.gamma[j] * rep.gamma[k]);
  return out;
}

// exp of a skew-Hermitian matrix through the Hermitian eigendecomposition
// of iS; exactly unitary up to roundoff.
inline Mat exp_skew(const Mat& S) {
  const cplx iu(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(iu * S);
  Mat V = es.eigenvectors();
  CVec ph(S.rows());
  for (int i = 0; i < S.rows(); ++i)
    ph[i] = std::exp(-iu * es.eigenvalues()[i]);
  return V * ph.asDiagonal() * V.adjoint();
}

namespace detail {

// Unique-up-to-phase intertwiner T with A_i T = T B_i, via the null space
// of the stacked Sylvester systems; rescaled to a unitary, phase pinned by
// making the largest entry real positive.
inline Mat intertwiner(const std::vector<Mat>& A, const std::vector<Mat>& B) {
  int da = static_cast<int>(A[0].rows());
  int db = static_cast<int>(B[0].rows());
  Mat sys(A.size() * da * db, da * db);
  for (size_t s = 0; s < A.size(); ++s) {
    // vec(A T - T B) = (I x A - B^T x I) vec(T), column-major vec
    Mat block = kron(Mat::Identity(db, db), A[s]) -
                kron(B[s].transpose(), Mat::Identity(da, da));
    sys.block(s * da * db, 0, da * db, da * db) = block;
  }
  Eigen::JacobiSVD<Mat> svd(sys, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] > 1e-8 * std::max(1.0, sv[0]))
    throw std::runtime_error("intertwiner: representations not equivalent");
  CVec t = svd.matrixV().col(da * db - 1);
  Mat T = Eigen::Map<Mat>(t.data(), da, db);

  Mat gram = T.adjoint() * T;
  double scale = std::sqrt(gram.trace().real() / db);
  T /= scale;
  int bi = 0, bj = 0;
  double best = 0.0;
  for (int j = 0; j < T.cols(); ++j)
    for (int i = 0; i < T.rows(); ++i)
      if (std::abs(T(i, j)) > best + 1e-12) {
        best = std::abs(T(i, j));
        bi = i;
        bj = j;
      }
  T *= std::abs(T(bi, bj)) / T(bi, bj);
  return T;
}

}  // namespace detail

// Antisymmetric principal log of a rotation. Eigenvalues -1 come in pairs
// and are handled through a real orthonormal basis of their joint
// eigenspace, where the log is the block rotation by pi.
inline RMat rotation_log(const RMat& R) {
  const int n = static_cast<int>(R.rows());
  Eigen::ComplexEigenSolver<Mat> es(R.cast<cplx>());
  RMat A = RMat::Zero(n, n);
  std::vector<RVec> flipped;
  for (int i = 0; i < n; ++i) {
    cplx lam = es.eigenvalues()[i];
    double theta = std::arg(lam);
    if (std::abs(lam + 1.0) < 1e-8) {
      RVec re = es.eigenvectors().col(i).real();
      RVec im = es.eigenvectors().col(i).imag();
      for (const RVec& v : {re, im}) {
        RVec w = v;
        for (const RVec& u : flipped) w -= u.dot(w) * u;
        if (w.norm() > 1e-8) flipped.push_back(w.normalized());
      }
    } else if (std::abs(theta) > 1e-14) {
      // conjugate pairs contribute theta * (im re^T - re im^T), counted once
      if (theta > 0) {
        RVec re = std::sqrt(2.0) * es.eigenvectors().col(i).real();
        RVec im = std::sqrt(2.0) * es.eigenvectors().col(i).imag();
        A += theta * (re * im.transpose() - im * re.transpose());
      }
    }
  }
  if (flipped.size() % 2 != 0)
    throw std::invalid_argument("rotation_log: determinant not +1");
  for (size_t k = 0; k + 1 < flipped.size(); k += 2)
    A += M_PI * (flipped[k + 1] * flipped[k].transpose() -
                 flipped[k] * flipped[k + 1].transpose());
  return 0.5 * (A - A.transpose().eval());
}

// Unitary S with S g_i S^dag = sum_j R_ji g_j for a rotation R, chosen
// continuously from the identity (S = exp of the spin lift of log R).
inline Mat spin_lift(const GammaRep& rep, const RMat& R) {
  if ((R.transpose() * R - RMat::Identity(rep.n, rep.n)).norm() > 1e-10 ||
      R.determinant() < 0.0)
    throw std::invalid_argument("spin_lift: not a rotation");
  // exp(spin_generator(B)) conjugates g_i to sum_j (e^{-B})_ji g_j
  RMat A = -rotation_log(R);
  Mat S = exp_skew(spin_generator(rep, A));
  for (int i = 0; i < rep.n; ++i) {
    Mat target = Mat::Zero(rep.d, rep.d);
    for (int j = 0; j < rep.n; ++j) target += R(j, i) * rep.gamma[j];
    if ((S * rep.gamma[i] - target * S).norm() > 1e-8)
      throw std::runtime_error("spin_lift: lift check failed");
  }
  return S;
}

enum class EmbeddingKind { J, JSharp, JPlus, JMinus, JSharpPlus, JSharpMinus, In };

// Isometric Spin(n-1)-equivariant map from the (n-1)-spinor module(s) into
// the n-spinor module; matrix columns are images of the source basis.
struct EmbeddingMap {
  int n = 0;
  EmbeddingKind kind = EmbeddingKind::J;
  Mat matrix;
};

namespace detail {

// Orthonormal basis of the +/- eigenspace of a Hermitian involution.
inline Mat eigenspace_basis(const Mat& H, double sign) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  int d = static_cast<int>(H.rows());
  Mat basis(d, d / 2);
  int c = 0;
  for (int i = 0; i < d; ++i)
    if (es.eigenvalues()[i] * sign > 0.0) basis.col(c++) = es.eigenvectors().col(i);
  if (c != d / 2) throw std::runtime_error("eigenspace_basis: unexpected multiplicity");
  return basis;
}

// I_n for n even: the +/-1 eigenspaces of omega_{n-1} inside Sigma_n carry
// the two odd-dimensional irreps; equivariant unitaries onto them are found
// by the intertwiner solve.
inline Mat build_in(const GammaRep& low, const GammaRep& high) {
  int d = high.d;
  Mat om = Mat::Identity(d, d) * epsilon_n(low.n);
  for (int i = 0; i < low.n; ++i) om = om * high.gamma[i];

  Mat vplus = eigenspace_basis(om, +1.0);
  Mat vminus = eigenspace_basis(om, -1.0);

  std::vector<Mat> restrP, restrM, lowS, lowSh;
  for (int i = 0; i < low.n; ++i) {
    restrP.push_back(vplus.adjoint() * high.gamma[i] * vplus);
    restrM.push_back(vminus.adjoint() * high.gamma[i] * vminus);
    lowS.push_back(low.gamma[i]);
    lowSh.push_back(-low.gamma[i]);
  }
  Mat tplus = intertwiner(restrP, lowS);
  Mat tminus = intertwiner(restrM, lowSh);

  Mat out(d, d);
  out.leftCols(d / 2) = vplus * tplus;
  out.rightCols(d / 2) = vminus * tminus;
  return out;
}

}  // namespace detail

inline EmbeddingMap build_embedding(int n, EmbeddingKind kind) {
  if (n < 2) throw std::invalid_argument("build_embedding: n must be >= 2");
  bool odd = (n % 2 == 1);
  if (odd && !(kind == EmbeddingKind::J || kind == EmbeddingKind::JSharp))
    throw std::invalid_argument("build_embedding: kind requires even n");
  if (!odd && (kind == EmbeddingKind::J || kind == EmbeddingKind::JSharp))
    throw std::invalid_argument("build_embedding: kind requires odd n");

  EmbeddingMap map;
  map.n = n;
  map.kind = kind;

  GammaRep low = build_rep(n - 1);
  if (odd) {
    // the odd rep extends the even one, so J is the identity and JSharp is
    // the even volume element (which anticommutes with vectors)
    if (kind == EmbeddingKind::J)
      map.matrix = Mat::Identity(low.d, low.d);
    else
      map.matrix = low.omega;
    return map;
  }

  GammaRep high = build_rep(n);
  Mat in = detail::build_in(low, high);
  if (kind == EmbeddingKind::In) {
    map.matrix = in;
    return map;
  }

  const cplx iu(0.0, 1.0);
  bool sharp = (kind == EmbeddingKind::JSharpPlus || kind == EmbeddingKind::JSharpMinus);
  bool plus = (kind == EmbeddingKind::JPlus || kind == EmbeddingKind::JSharpPlus);
  Mat part = sharp ? in.rightCols(high.d / 2) : in.leftCols(high.d / 2);
  cplx s = plus ? -iu : iu;  // J^{pm} = (I -/+ i g_n I)/sqrt(2)
  map.matrix = (part + s * (high.gamma[n - 1] * part)) / std::sqrt(2.0);
  return map;
}

// Orientation-reversal data: rho_sharp realizes the frame flip on spinor
// components, K intertwines the Clifford action with its negative. For even
// n the target module is the same and K anticommutes with every gamma; for
// odd n the target is the variant-flipped module (gammas negated), where
// the intertwiner is the identity.
struct OrientationMaps {
  GammaRep rep;
  bool sharp_target = false;
  Mat rho_sharp;
  Mat K;
  Mat Psi;
};

inline OrientationMaps build_orientation_maps(const GammaRep& rep) {
  OrientationMaps maps;
  maps.rep = rep;
  maps.rho_sharp = rep.gamma[0];
  if (rep.n % 2 == 0) {
    maps.sharp_target = false;
    maps.K = rep.omega;
  } else {
    maps.sharp_target = true;
    maps.K = Mat::Identity(rep.d, rep.d);
  }
  maps.Psi = maps.K * maps.rho_sharp;
  return maps;
}

}  // namespace spingeo
