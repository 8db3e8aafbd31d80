#pragma once

#include <oedcs/errors.hpp>
#include <oedcs/linalg.hpp>
#include <oedcs/linear_operator.hpp>
#include <oedcs/random.hpp>
#include <oedcs/types.hpp>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cstdint>
#include <optional>
#include <string>

namespace oedcs {

struct SketchConfig {
  Index k = 1;
  Index p = 20;  // oversampling
  Index q = 1;   // subspace iterations
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1) throw DomainError("SketchConfig: k must be >= 1");
    if (p < 0 || q < 0) throw DomainError("SketchConfig: p and q must be >= 0");
  }
};

/// Truncated SVD A ~ U_k diag(sigma) V_k^T of an out_dim x in_dim operator.
template <typename Scalar>
struct SvdFactors {
  Matrix<Scalar> u;
  Vector<Scalar> sigma;
  Matrix<Scalar> v;
  std::optional<Vector<Scalar>> residual_sigma;

  Index rank() const { return sigma.size(); }
};

namespace detail {

template <typename Scalar>
Matrix<Scalar> orthonormal_basis(const Matrix<Scalar>& y) {
  Eigen::HouseholderQR<Matrix<Scalar>> qr(y);
  return qr.householderQ() * Matrix<Scalar>::Identity(y.rows(), y.cols());
}

template <typename Scalar>
void check_rank(const Vector<Scalar>& sigma, Index k, const char* who) {
  if (sigma.size() < k || !(sigma(k - 1) > Scalar(1e-12) * sigma(0))) {
    throw RankDeficiencyError(std::string(who) + ": sigma_k <= 1e-12 sigma_1; k exceeds numerical rank");
  }
}

}  // namespace detail

/// Randomized range finder with q subspace iterations (Halko, Martinsson and
/// Tropp, Alg. 4.4 with re-orthonormalization after every application).
/// Consumes exactly (2q + 2)(k + p) applies: (q + 1)(k + p) with A and the same
/// number with A^T.
template <typename Scalar>
SvdFactors<Scalar> randomized_svd(const LinearOperator<Scalar>& op, const SketchConfig& cfg) {
  cfg.validate();
  const Index ell = cfg.k + cfg.p;
  if (ell > std::min(op.out_dim(), op.in_dim())) {
    throw DimensionError("randomized_svd: k + p = " + std::to_string(ell) +
                         " exceeds min(out_dim, in_dim)");
  }
  const Matrix<Scalar> omega = gaussian_matrix<Scalar>(op.in_dim(), ell, Scalar(1), cfg.seed);
  Matrix<Scalar> q = detail::orthonormal_basis<Scalar>(op.apply_columns(omega));
  for (Index it = 0; it < cfg.q; ++it) {
    const Matrix<Scalar> z = detail::orthonormal_basis<Scalar>(op.apply_adjoint_columns(q));
    q = detail::orthonormal_basis<Scalar>(op.apply_columns(z));
  }
  // B = Q^T A, formed as (A^T Q)^T.
  const Matrix<Scalar> bt = op.apply_adjoint_columns(q);
  Eigen::BDCSVD<Matrix<Scalar>> svd(bt.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  detail::check_rank<Scalar>(svd.singularValues(), cfg.k, "randomized_svd");

  SvdFactors<Scalar> out;
  out.u = q * svd.matrixU().leftCols(cfg.k);
  out.sigma = svd.singularValues().head(cfg.k);
  out.v = svd.matrixV().leftCols(cfg.k);
  return out;
}

/// Exact truncated SVD of a dense matrix; residual_sigma holds the tail.
template <typename Derived>
SvdFactors<typename Derived::Scalar> dense_svd(const Eigen::MatrixBase<Derived>& a, Index k) {
  using Scalar = typename Derived::Scalar;
  if (k < 1 || k > std::min(a.rows(), a.cols())) {
    throw DimensionError("dense_svd: k outside [1, min(rows, cols)]");
  }
  Eigen::BDCSVD<Matrix<Scalar>> svd(a.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector<Scalar>& s = svd.singularValues();
  SvdFactors<Scalar> out;
  out.u = svd.matrixU().leftCols(k);
  out.sigma = s.head(k);
  out.v = svd.matrixV().leftCols(k);
  out.residual_sigma = Vector<Scalar>(s.tail(s.size() - k));
  return out;
}

/// Singular values of A - U_k Sigma_k V_k^T for a dense A.
template <typename Derived>
Vector<typename Derived::Scalar> residual_spectrum(
    const Eigen::MatrixBase<Derived>& a, const SvdFactors<typename Derived::Scalar>& factors) {
  using Scalar = typename Derived::Scalar;
  if (factors.u.rows() != a.rows() || factors.v.rows() != a.cols()) {
    throw DimensionError("residual_spectrum: factors do not match the operator");
  }
  const Matrix<Scalar> residual =
      a - factors.u * factors.sigma.asDiagonal() * factors.v.transpose();
  const Vector<Scalar> s = singular_values(residual);
  // Rank of the residual is at most min(rows, cols) - k.
  const Index keep = std::max<Index>(0, std::min(a.rows(), a.cols()) - factors.rank());
  return s.head(std::min(keep, s.size()));
}

/// Matrix-free variant: densifies the operator (in_dim applies) first.
template <typename Scalar>
Vector<Scalar> residual_spectrum(const LinearOperator<Scalar>& op,
                                 const SvdFactors<Scalar>& factors) {
  return residual_spectrum(densify(op), factors);
}

}  // namespace oedcs
