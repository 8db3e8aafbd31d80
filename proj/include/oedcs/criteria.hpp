#pragma once

#include <oedcs/errors.hpp>
#include <oedcs/linalg.hpp>
#include <oedcs/rsvd.hpp>
#include <oedcs/types.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

namespace oedcs {

/// phi_D of the columns `indices` of a dense matrix. An empty selection gives 0.
template <typename Derived>
typename Derived::Scalar evaluate_design(const Eigen::MatrixBase<Derived>& a,
                                         const IndexList& indices) {
  for (Index j : indices) {
    if (j < 0 || j >= a.cols()) throw DimensionError("evaluate_design: index out of range");
  }
  if (indices.empty()) return typename Derived::Scalar(0);
  return phi_d_of_matrix(select_columns(a, indices));
}

/// sum_i log(1 + sigma_i^2 / nu^2); 0 when nu is infinite.
template <typename Derived>
typename Derived::Scalar gks_lower_bound(const Eigen::MatrixBase<Derived>& sigma_k,
                                         typename Derived::Scalar v11_inv_norm) {
  using Scalar = typename Derived::Scalar;
  if (std::isinf(v11_inv_norm)) return Scalar(0);
  // Any k x k block of a matrix with orthonormal rows has sigma_min <= 1.
  if (!(v11_inv_norm >= Scalar(1) - Scalar(1e-10))) {
    throw DomainError("gks_lower_bound: ||V11^{-1}|| must be >= 1");
  }
  return phi_d((sigma_k / v11_inv_norm).eval());
}

/// phi_D(Sigma_k D) with d_j = 1 / min(||V_(j,j)^{-1}||, ||V11^{-1}||), where
/// V_(j,j) is the leading j x j principal block of V11.
template <typename Derived, typename DerivedV>
typename Derived::Scalar combined_lower_bound(const Eigen::MatrixBase<Derived>& sigma_k,
                                              const Eigen::MatrixBase<DerivedV>& v11) {
  using Scalar = typename Derived::Scalar;
  const Index k = v11.rows();
  if (v11.cols() != k || sigma_k.size() != k) {
    throw DimensionError("combined_lower_bound: V11 must be k x k with k = |sigma_k|");
  }
  const Scalar whole = inverse_spectral_norm(v11);
  Vector<Scalar> scaled(k);
  for (Index j = 0; j < k; ++j) {
    const Scalar lead = inverse_spectral_norm(v11.topLeftCorner(j + 1, j + 1));
    const Scalar nu = std::min(lead, whole);
    scaled(j) = std::isinf(nu) ? Scalar(0) : sigma_k(j) / nu;
  }
  return phi_d(scaled);
}

/// C_g = (e sqrt(d) / (p + 1)) (2/delta)^{1/(p+1)} (sqrt(n) + sqrt(d) + sqrt(2 log(2/delta))).
inline double raf_constant(Index n, Index d, Index p, double delta) {
  if (p < 2) throw DomainError("raf_constant: requires p >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("raf_constant: delta must lie in (0, 1)");
  if (n < 1 || d < 1) throw DimensionError("raf_constant: n and d must be positive");
  const double pp1 = static_cast<double>(p + 1);
  const double sd = std::sqrt(static_cast<double>(d));
  return std::numbers::e * sd / pp1 * std::pow(2.0 / delta, 1.0 / pp1) *
         (std::sqrt(static_cast<double>(n)) + sd + std::sqrt(2.0 * std::log(2.0 / delta)));
}

/// q_f^U(m, s, k) = q_f(s, k) sqrt(2 m / (s (1 - eps))).
inline double hybrid_factor(Index m, Index s, Index k, double f, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("hybrid_factor: eps must lie in (0, 1)");
  if (s < k) throw DomainError("hybrid_factor: requires s >= k");
  return qf_factor(s, k, f) *
         std::sqrt(2.0 * static_cast<double>(m) / (static_cast<double>(s) * (1.0 - eps)));
}

template <typename Scalar>
struct BoundReport {
  Scalar phi_full = 0;
  Scalar phi_sigma_k = 0;
  Scalar phi_selected = 0;
  Scalar phi_lower_gks = 0;
  std::optional<Scalar> phi_lower_combined;
  std::optional<Scalar> phi_opt;
  Scalar v11_inv_norm = 0;
  Scalar q_f = 0;
  std::optional<Scalar> c_g;
  std::optional<Scalar> q_f_u;

  // Inequalities, re-checked with absolute slack 1e-8 when the report is built.
  bool lower_gks_holds = false;       // phi_lower_gks <= phi_selected
  bool lower_combined_holds = true;   // phi_lower_combined <= phi_selected
  bool gks_le_combined = true;        // phi_lower_gks <= phi_lower_combined
  bool selected_le_opt = true;        // phi_selected <= phi_opt
  bool selected_le_sigma_k = false;   // phi_selected <= phi_sigma_k (and phi_opt)
  bool sigma_k_le_full = false;       // phi_sigma_k <= phi_full

  bool holds() const {
    return lower_gks_holds && lower_combined_holds && gks_le_combined && selected_le_opt &&
           selected_le_sigma_k && sigma_k_le_full;
  }
};

struct BoundOptions {
  double f = 1.0;                     // sRRQR factor entering q_f
  std::optional<double> raf_delta;    // report C_g when set
  Index raf_p = 20;
  std::optional<Index> hybrid_s;      // report q_f^U when set
  double hybrid_eps = 0.5;
  std::optional<double> phi_opt;      // exhaustive optimum when known
  double slack = 1e-8;
};

/// Bounds for the selection `indices` of a dense A (n x m), evaluated from its
/// exact SVD. `exact` must hold at least k leading factors of A.
template <typename Derived>
BoundReport<typename Derived::Scalar> make_bound_report(
    const Eigen::MatrixBase<Derived>& a, const SvdFactors<typename Derived::Scalar>& exact,
    const IndexList& indices, const BoundOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  const Index k = static_cast<Index>(indices.size());
  const Index m = a.cols();
  if (k < 1 || k > exact.rank()) throw DimensionError("make_bound_report: bad selection size");
  const Vector<Scalar> sigma_k = exact.sigma.head(k);
  const Matrix<Scalar> vt = exact.v.leftCols(k).transpose();
  const Matrix<Scalar> v11 = select_columns(vt, indices);
  const Scalar slack = static_cast<Scalar>(opts.slack);

  BoundReport<Scalar> r;
  r.phi_full = phi_d(singular_values(a));
  r.phi_sigma_k = phi_d(sigma_k);
  r.phi_selected = evaluate_design(a, indices);
  r.v11_inv_norm = inverse_spectral_norm(v11);
  r.phi_lower_gks = gks_lower_bound(sigma_k, r.v11_inv_norm);
  r.phi_lower_combined = combined_lower_bound(sigma_k, v11);
  r.q_f = qf_factor<Scalar>(m, k, static_cast<Scalar>(opts.f));
  if (opts.phi_opt) r.phi_opt = static_cast<Scalar>(*opts.phi_opt);
  if (opts.raf_delta) {
    r.c_g = static_cast<Scalar>(raf_constant(a.rows(), k + opts.raf_p, opts.raf_p, *opts.raf_delta));
  }
  if (opts.hybrid_s) {
    r.q_f_u = static_cast<Scalar>(hybrid_factor(m, *opts.hybrid_s, k, opts.f, opts.hybrid_eps));
  }

  r.lower_gks_holds = r.phi_lower_gks <= r.phi_selected + slack;
  r.lower_combined_holds = *r.phi_lower_combined <= r.phi_selected + slack;
  r.gks_le_combined = r.phi_lower_gks <= *r.phi_lower_combined + slack;
  const Scalar top = r.phi_opt ? *r.phi_opt : r.phi_selected;
  r.selected_le_opt = r.phi_selected <= top + slack;
  r.selected_le_sigma_k = top <= r.phi_sigma_k + slack;
  r.sigma_k_le_full = r.phi_sigma_k <= r.phi_full + slack;
  return r;
}

template <typename Scalar>
struct SubsetOptimum {
  IndexList indices;
  Scalar phi = 0;
};

/// Exhaustive search over all k-subsets of the columns of a dense A.
/// Guarded to at most 5e6 subsets.
template <typename Derived>
SubsetOptimum<typename Derived::Scalar> best_subset(const Eigen::MatrixBase<Derived>& a, Index k) {
  using Scalar = typename Derived::Scalar;
  const Index m = a.cols();
  if (k < 1 || k > m) throw DimensionError("best_subset: requires 1 <= k <= m");
  double count = 1.0;
  for (Index i = 0; i < k; ++i) count = count * double(m - i) / double(i + 1);
  if (count > 5e6) throw DimensionError("best_subset: too many subsets for exhaustive search");

  const Matrix<Scalar> gram = a.transpose() * a;
  SubsetOptimum<Scalar> best;
  best.phi = -std::numeric_limits<Scalar>::infinity();
  IndexList current(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i;
  Matrix<Scalar> sub(k, k);
  while (true) {
    for (Index i = 0; i < k; ++i) {
      for (Index j = 0; j < k; ++j) {
        sub(i, j) = gram(current[static_cast<std::size_t>(i)], current[static_cast<std::size_t>(j)]);
      }
    }
    sub.diagonal().array() += Scalar(1);
    const Eigen::LLT<Matrix<Scalar>> llt(sub);
    const Scalar phi = Scalar(2) * llt.matrixLLT().diagonal().array().log().sum();
    if (phi > best.phi) {
      best.phi = phi;
      best.indices = current;
    }
    Index i = k - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

}  // namespace oedcs
