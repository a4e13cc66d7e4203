#pragma once

// Vectorization algebra and matrix-series primitives shared by the whole
// library. All recursions live in vec space (column-major stacking); the
// estimation losses live in vech space (column-major lower-triangular
// half-vectorization).

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace mogi {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline int vech_len(int p) { return p * (p + 1) / 2; }

// vec(M): stacks the columns.
inline Vec vec(const Mat& M) {
  return Eigen::Map<const Vec>(M.data(), M.size());
}

inline Mat unvec(const Vec& v, int p) {
  if (v.size() != p * p) throw std::invalid_argument("unvec: length mismatch");
  return Eigen::Map<const Mat>(v.data(), p, p);
}

// Half-vectorization, column-major lower triangle: (11,21,...,p1,22,...,pp).
inline Vec vech(const Mat& M) {
  const int p = static_cast<int>(M.rows());
  Vec v(vech_len(p));
  int idx = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) v[idx++] = M(i, j);
  return v;
}

// Inverse of vech onto symmetric matrices.
inline Mat unvech(const Vec& v, int p) {
  if (v.size() != vech_len(p)) throw std::invalid_argument("unvech: length mismatch");
  Mat M(p, p);
  int idx = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) {
      M(i, j) = v[idx];
      M(j, i) = v[idx];
      ++idx;
    }
  return M;
}

// Lower-triangular matrix from its vech entries (upper part zero).
inline Mat unvech_lower(const Vec& v, int p) {
  if (v.size() != vech_len(p)) throw std::invalid_argument("unvech_lower: length mismatch");
  Mat M = Mat::Zero(p, p);
  int idx = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) M(i, j) = v[idx++];
  return M;
}

inline Mat symmetrize(const Mat& M) { return 0.5 * (M + M.transpose()); }

// Elimination/duplication maps between vec and vech space.
struct VecIndexMaps {
  int p;
  Mat elimination;  // vech_len x p^2, vech(M) = E vec(M)
  Mat duplication;  // p^2 x vech_len, vec(M) = D vech(M) for symmetric M

  explicit VecIndexMaps(int dim) : p(dim) {
    if (dim <= 0) throw std::invalid_argument("VecIndexMaps: dim must be positive");
    const int h = vech_len(p);
    elimination = Mat::Zero(h, p * p);
    duplication = Mat::Zero(p * p, h);
    int idx = 0;
    for (int j = 0; j < p; ++j)
      for (int i = j; i < p; ++i) {
        elimination(idx, j * p + i) = 1.0;
        duplication(j * p + i, idx) = 1.0;
        duplication(i * p + j, idx) = 1.0;
        ++idx;
      }
  }
};

inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

inline double spectral_norm(const Mat& M) {
  if (M.rows() == 1 && M.cols() == 1) return std::abs(M(0, 0));
  return M.jacobiSvd().singularValues()(0);
}

struct VarrhoSeries {
  Mat rho1;  // sum B^k/(k+1)!
  Mat rho2;  // sum B^k/(k+2)!
  Mat rho3;  // sum B^k/(k+3)!
};

// Truncated series evaluation of the rho matrices; handles B = 0 and
// singular B, unlike the inverse-based closed forms.
inline VarrhoSeries varrho_series(const Mat& B, double tol = 1e-15, int max_terms = 64) {
  if (B.rows() != B.cols()) throw std::invalid_argument("varrho_series: square matrix required");
  if (spectral_norm(B) >= 1.0)
    throw std::domain_error("varrho_series: spectral norm of B must be < 1");
  const int n = static_cast<int>(B.rows());
  VarrhoSeries out{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
  Mat term = Mat::Identity(n, n);  // B^k
  double f1 = 1.0;                 // (k+1)!
  double f2 = 2.0;                 // (k+2)!
  double f3 = 6.0;                 // (k+3)!
  for (int k = 0; k < max_terms; ++k) {
    out.rho1 += term / f1;
    out.rho2 += term / f2;
    out.rho3 += term / f3;
    if (term.norm() / f1 < tol) break;
    term = term * B;
    f1 *= (k + 2);
    f2 *= (k + 3);
    f3 *= (k + 4);
  }
  return out;
}

// Eigenvalue clipping at zero; keeps symmetry.
inline Mat psd_project(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(M));
  Vec ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace mogi
