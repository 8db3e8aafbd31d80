#pragma once

#include <oedcs/errors.hpp>
#include <oedcs/types.hpp>

#include <Eigen/Householder>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace oedcs {

/// Column-pivoted QR factorization M * P = Q * R.
///
/// `q` has orthonormal columns (rows x min(rows, cols)); `r` is upper
/// trapezoidal with a nonnegative diagonal; `permutation[j]` is the original
/// index of the column moved to position j. `leading` is the size k of the
/// R11 block the factorization was computed for.
template <typename Scalar>
struct PivotedQr {
  Matrix<Scalar> q;
  Matrix<Scalar> r;
  IndexList permutation;
  Index leading = 0;

  Matrix<Scalar> r11() const { return r.topLeftCorner(leading, leading); }
  Matrix<Scalar> r12() const { return r.topRightCorner(leading, r.cols() - leading); }
  Matrix<Scalar> r22() const {
    return r.bottomRightCorner(r.rows() - leading, r.cols() - leading);
  }
  /// The first `leading` pivots.
  IndexList selected() const {
    return IndexList(permutation.begin(), permutation.begin() + leading);
  }
};

/// Singular values in nonincreasing order.
template <typename Derived>
Vector<typename Derived::Scalar> singular_values(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Vector<Scalar>(0);
  Eigen::BDCSVD<Matrix<Scalar>> svd(m.eval());
  return svd.singularValues();
}

namespace detail {

// Householder QR of `work` (columns already arranged according to `perm`).
// The first `pivot_steps` steps pick the remaining column of largest residual
// norm; residual norms are recomputed from the partially reduced matrix at every
// step, and exact ties go to the lowest original column index.
template <typename Scalar>
PivotedQr<Scalar> householder_qr(Matrix<Scalar> work, IndexList perm, Index pivot_steps,
                                 Index leading) {
  const Index rows = work.rows();
  const Index cols = work.cols();
  const Index steps = std::min(rows, cols);
  constexpr Scalar tie_tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon();

  Matrix<Scalar> essentials = Matrix<Scalar>::Zero(rows, steps);
  Vector<Scalar> taus = Vector<Scalar>::Zero(steps);
  Vector<Scalar> workspace(cols);

  for (Index j = 0; j < steps; ++j) {
    if (j < pivot_steps) {
      Index best = j;
      Scalar best_norm = work.col(j).tail(rows - j).norm();
      for (Index c = j + 1; c < cols; ++c) {
        const Scalar norm = work.col(c).tail(rows - j).norm();
        const bool larger = norm > best_norm * (Scalar(1) + tie_tol);
        const bool tied = !larger && norm >= best_norm * (Scalar(1) - tie_tol);
        if (larger || (tied && perm[c] < perm[best])) {
          best = c;
          best_norm = norm;
        }
      }
      if (best != j) {
        work.col(j).swap(work.col(best));
        std::swap(perm[j], perm[best]);
      }
    }

    const Index tail = rows - j;
    Vector<Scalar> essential(tail > 1 ? tail - 1 : 0);
    Scalar tau;
    Scalar beta;
    work.col(j).tail(tail).makeHouseholder(essential, tau, beta);
    work(j, j) = beta;
    work.col(j).tail(tail - 1).setZero();
    if (j + 1 < cols) {
      auto trailing = work.bottomRightCorner(tail, cols - j - 1);
      trailing.applyHouseholderOnTheLeft(essential, tau, workspace.data());
    }
    essentials.col(j).tail(tail - 1) = essential;
    taus(j) = tau;
  }

  Matrix<Scalar> q = Matrix<Scalar>::Identity(rows, steps);
  for (Index j = steps - 1; j >= 0; --j) {
    const Index tail = rows - j;
    auto block = q.bottomRows(tail);
    Vector<Scalar> essential = essentials.col(j).tail(tail - 1);
    block.applyHouseholderOnTheLeft(essential, taus(j), workspace.data());
  }

  Matrix<Scalar> r = work.topRows(steps).template triangularView<Eigen::Upper>();
  for (Index i = 0; i < steps; ++i) {
    if (r(i, i) < Scalar(0)) {
      r.row(i) *= Scalar(-1);
      q.col(i) *= Scalar(-1);
    }
  }
  return PivotedQr<Scalar>{std::move(q), std::move(r), std::move(perm), leading};
}

template <typename Derived>
Matrix<typename Derived::Scalar> permute_columns(const Eigen::MatrixBase<Derived>& m,
                                                 const IndexList& perm) {
  return select_columns(m, perm);
}

}  // namespace detail

/// QR with column pivoting (Businger-Golub): the first k pivots are chosen
/// greedily by largest residual column norm, ties to the lowest original index.
/// Columns after the first k are reduced without further pivoting.
template <typename Derived>
PivotedQr<typename Derived::Scalar> qrcp(const Eigen::MatrixBase<Derived>& m, Index k) {
  using Scalar = typename Derived::Scalar;
  if (k < 0 || k > std::min(m.rows(), m.cols())) {
    throw DimensionError("qrcp: k=" + std::to_string(k) + " outside [0, min(rows, cols)]");
  }
  IndexList perm(static_cast<std::size_t>(m.cols()));
  std::iota(perm.begin(), perm.end(), Index{0});
  return detail::householder_qr<Scalar>(m.eval(), std::move(perm), k, k);
}

/// Strong rank-revealing QR with parameter f >= 1.
///
/// Starts from QRCP and swaps a leading column i with a trailing column j while
/// sqrt((R11^{-1} R12)_{ij}^2 + (gamma_j / omega_i)^2) > f, where gamma_j is the
/// norm of column j of R22 and omega_i the reciprocal norm of row i of R11^{-1}.
/// Each swap grows |det R11| by more than f, so the loop terminates. On return
/// max |(R11^{-1} R12)_{ij}| <= f and sigma_i(R11) >= sigma_i(M) / sqrt(1 + f^2 k (n-k)).
template <typename Derived>
PivotedQr<typename Derived::Scalar> srrqr(const Eigen::MatrixBase<Derived>& m, Index k,
                                          typename Derived::Scalar f) {
  using Scalar = typename Derived::Scalar;
  if (!(f >= Scalar(1))) throw DomainError("srrqr: f must be >= 1");
  if (k < 1 || k > std::min(m.rows(), m.cols())) {
    throw DimensionError("srrqr: k=" + std::to_string(k) + " outside [1, min(rows, cols)]");
  }
  const Matrix<Scalar> matrix = m.eval();
  const Vector<Scalar> sigma = singular_values(matrix);
  const Scalar rank_floor = Scalar(1e-12) * sigma(0);
  if (!(sigma(k - 1) > rank_floor)) {
    throw RankDeficiencyError("srrqr: sigma_k(M) <= 1e-12 sigma_1(M); k exceeds numerical rank");
  }

  PivotedQr<Scalar> qr = qrcp(matrix, k);
  const Index cols = matrix.cols();
  if (k == cols) return qr;

  const Index max_swaps = 10 * k * cols;
  const Scalar f2 = f * f;
  const Scalar swap_slack = std::max(Scalar(1e-10), Scalar(1024) * std::numeric_limits<Scalar>::epsilon());
  for (Index swap = 0;; ++swap) {
    const Matrix<Scalar> r11 = qr.r11();
    if (!(r11.diagonal().cwiseAbs().minCoeff() > Scalar(0))) {
      throw SingularityError("srrqr: leading block became singular");
    }
    const Matrix<Scalar> r11_inv =
        r11.template triangularView<Eigen::Upper>().solve(Matrix<Scalar>::Identity(k, k));
    const Matrix<Scalar> coupling = r11_inv * qr.r12();
    const Matrix<Scalar> r22 = qr.r22();
    const Vector<Scalar> gamma =
        r22.rows() > 0 ? Vector<Scalar>(r22.colwise().norm().transpose())
                       : Vector<Scalar>(Vector<Scalar>::Zero(cols - k));
    const Vector<Scalar> inv_row_norm = r11_inv.rowwise().norm();

    Scalar best = Scalar(0);
    Index bi = 0;
    Index bj = 0;
    for (Index j = 0; j < cols - k; ++j) {
      for (Index i = 0; i < k; ++i) {
        const Scalar g = gamma(j) * inv_row_norm(i);
        const Scalar rho2 = coupling(i, j) * coupling(i, j) + g * g;
        if (rho2 > best) {
          best = rho2;
          bi = i;
          bj = j;
        }
      }
    }
    // Relative slack keeps rounding from cycling between equal columns at f = 1.
    if (best <= f2 * (Scalar(1) + swap_slack)) break;
    if (swap >= max_swaps) {
      throw ConvergenceError("srrqr: swap loop did not converge within 10*k*cols iterations");
    }
    IndexList perm = qr.permutation;
    std::swap(perm[static_cast<std::size_t>(bi)], perm[static_cast<std::size_t>(k + bj)]);
    Matrix<Scalar> permuted = detail::permute_columns(matrix, perm);
    qr = detail::householder_qr<Scalar>(std::move(permuted), std::move(perm), 0, k);
  }

  const Vector<Scalar> r11_sigma = singular_values(qr.r11());
  if (!(r11_sigma(k - 1) > rank_floor)) {
    throw SingularityError("srrqr: leading block numerically rank deficient after swaps");
  }
  return qr;
}

/// D-optimality of a spectrum: sum_i log(1 + sigma_i^2).
template <typename Derived>
typename Derived::Scalar phi_d(const Eigen::MatrixBase<Derived>& sigma) {
  using Scalar = typename Derived::Scalar;
  Scalar total = Scalar(0);
  for (Index i = 0; i < sigma.size(); ++i) {
    const Scalar s = sigma(i);
    if (!(s >= Scalar(0))) throw DomainError("phi_d: singular values must be nonnegative");
    total += std::log1p(s * s);
  }
  return total;
}

/// logdet(I + C C^T), evaluated on the smaller Gram side (C^T C or C C^T).
template <typename Derived>
typename Derived::Scalar phi_d_of_matrix(const Eigen::MatrixBase<Derived>& c) {
  using Scalar = typename Derived::Scalar;
  if (c.size() == 0) return Scalar(0);
  if (!c.allFinite()) throw DomainError("phi_d_of_matrix: non-finite entry");
  const Matrix<Scalar> gram = c.cols() <= c.rows() ? Matrix<Scalar>(c.transpose() * c)
                                                   : Matrix<Scalar>(c * c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(gram, Eigen::EigenvaluesOnly);
  Scalar total = Scalar(0);
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
    total += std::log1p(std::max(eig.eigenvalues()(i), Scalar(0)));
  }
  return total;
}

/// ||M^{-1}||_2 = 1 / sigma_min(M); +infinity when sigma_min <= 1e-14 sigma_max.
template <typename Derived>
typename Derived::Scalar inverse_spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError("inverse_spectral_norm: matrix must be square and nonempty");
  }
  const Vector<Scalar> sigma = singular_values(m);
  const Scalar smax = sigma(0);
  const Scalar smin = sigma(sigma.size() - 1);
  if (!(smax > Scalar(0)) || smin <= Scalar(1e-14) * smax) {
    return std::numeric_limits<Scalar>::infinity();
  }
  return Scalar(1) / smin;
}

/// sqrt(1 + f^2 k (m - k)), the sRRQR distortion factor.
template <typename Scalar = double>
Scalar qf_factor(Index m, Index k, Scalar f) {
  if (k < 1 || k > m) throw DimensionError("qf_factor: requires 1 <= k <= m");
  if (!(f >= Scalar(1))) throw DomainError("qf_factor: f must be >= 1");
  return std::sqrt(Scalar(1) + f * f * Scalar(k) * Scalar(m - k));
}

}  // namespace oedcs
