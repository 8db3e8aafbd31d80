#pragma once

#include <oedcs/errors.hpp>
#include <oedcs/linalg.hpp>
#include <oedcs/linear_operator.hpp>
#include <oedcs/random.hpp>
#include <oedcs/rsvd.hpp>
#include <oedcs/types.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>

namespace oedcs {

/// Pivoting rule for the second stage of GKS, RAF and hybrid selection.
struct PivotMethod {
  enum class Rule { qrcp, srrqr };
  Rule rule = Rule::qrcp;
  double f = 1.0;

  static PivotMethod qrcp() { return {}; }
  static PivotMethod srrqr(double f) { return {Rule::srrqr, f}; }
  std::string name() const { return rule == Rule::qrcp ? "qrcp" : "srrqr"; }
};

/// Apply counts follow the PDE-solve convention: `forward_applies` counts
/// applications of A^T (one F solve each), `adjoint_applies` counts
/// applications of A (one F^T solve each).
template <typename Scalar>
struct SelectionDiagnostics {
  std::optional<Scalar> v11_inv_norm;
  Vector<Scalar> sigma_k;
  std::uint64_t forward_applies = 0;
  std::uint64_t adjoint_applies = 0;
  std::optional<std::uint64_t> seed;
  std::optional<Index> s;
  std::optional<Scalar> f;
  std::optional<Scalar> beta;
  std::optional<Scalar> sketch_sigma_k;  // sigma_k(V_k^T S D), hybrid only
  IndexList candidates;                  // distinct stage-1 samples, hybrid only
};

template <typename Scalar>
struct SelectionResult {
  IndexList indices;
  std::optional<Vector<Scalar>> weights;
  std::string method;
  SelectionDiagnostics<Scalar> diagnostics;

  Index k() const { return static_cast<Index>(indices.size()); }
};

template <typename Scalar>
struct SamplingDistribution {
  Vector<Scalar> pi;
  Vector<Scalar> tau;
  Scalar beta;
};

namespace detail {

template <typename Scalar>
struct ApplyMeter {
  explicit ApplyMeter(const LinearOperator<Scalar>& a)
      : op(a), at0(a.adjoint_count()), a0(a.forward_count()) {}
  void record(SelectionDiagnostics<Scalar>& d) const {
    d.forward_applies = op.adjoint_count() - at0;
    d.adjoint_applies = op.forward_count() - a0;
  }
  const LinearOperator<Scalar>& op;
  std::uint64_t at0;
  std::uint64_t a0;
};

template <typename Scalar>
PivotedQr<Scalar> pivot(const Matrix<Scalar>& m, Index k, const PivotMethod& method) {
  if (method.rule == PivotMethod::Rule::srrqr) return srrqr(m, k, static_cast<Scalar>(method.f));
  return qrcp(m, k);
}

template <typename Scalar>
void check_selectable(Index k, Index m) {
  if (k < 1 || k > m) {
    throw DimensionError("selection: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(m) + "]");
  }
}

}  // namespace detail

/// tau_j = ||e_j^T V_k||^2. V_k must have orthonormal columns to 1e-8.
template <typename Derived>
Vector<typename Derived::Scalar> leverage_scores(const Eigen::MatrixBase<Derived>& v_k) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> gram = v_k.transpose() * v_k;
  const Scalar defect =
      (gram - Matrix<Scalar>::Identity(v_k.cols(), v_k.cols())).cwiseAbs().maxCoeff();
  if (!(defect <= Scalar(1e-8))) {
    throw ContractError("leverage_scores: columns are not orthonormal (defect " +
                        std::to_string(static_cast<double>(defect)) + ")");
  }
  return v_k.rowwise().squaredNorm();
}

/// pi_j = beta tau_j / k + (1 - beta) / m.
template <typename Derived>
SamplingDistribution<typename Derived::Scalar> sampling_distribution(
    const Eigen::MatrixBase<Derived>& tau, Index k, Index m, typename Derived::Scalar beta) {
  using Scalar = typename Derived::Scalar;
  if (!(beta > Scalar(0) && beta <= Scalar(1))) {
    throw DomainError("sampling_distribution: beta must lie in (0, 1]");
  }
  if (tau.size() != m || k < 1) throw DimensionError("sampling_distribution: size mismatch");
  Vector<Scalar> pi = (beta / Scalar(k)) * tau.array() + (Scalar(1) - beta) / Scalar(m);
  return {std::move(pi), tau, beta};
}

/// GKS second stage: first k pivots of a pivoted QR of V_k^T.
template <typename Derived>
SelectionResult<typename Derived::Scalar> gks_select_from_basis(
    const Eigen::MatrixBase<Derived>& v_k, const Vector<typename Derived::Scalar>& sigma_k,
    Index k, PivotMethod pivot = PivotMethod::qrcp()) {
  using Scalar = typename Derived::Scalar;
  detail::check_selectable<Scalar>(k, v_k.rows());
  if (v_k.cols() != k) throw DimensionError("gks_select: V_k must have exactly k columns");
  const Matrix<Scalar> vt = v_k.transpose();
  const PivotedQr<Scalar> qr = detail::pivot(vt, k, pivot);

  SelectionResult<Scalar> out;
  out.indices = qr.selected();
  out.method = "gks";
  out.diagnostics.sigma_k = sigma_k;
  out.diagnostics.v11_inv_norm = inverse_spectral_norm(select_columns(vt, out.indices));
  if (pivot.rule == PivotMethod::Rule::srrqr) out.diagnostics.f = static_cast<Scalar>(pivot.f);
  return out;
}

/// Randomized SVD of A followed by pivoted QR on V_k^T.
template <typename Scalar>
SelectionResult<Scalar> gks_select(const LinearOperator<Scalar>& a, Index k, SketchConfig cfg,
                                   PivotMethod pivot = PivotMethod::qrcp(),
                                   SvdFactors<Scalar>* factors_out = nullptr) {
  detail::check_selectable<Scalar>(k, a.in_dim());
  cfg.k = k;
  const detail::ApplyMeter<Scalar> meter(a);
  SvdFactors<Scalar> factors = randomized_svd(a, cfg);
  SelectionResult<Scalar> out = gks_select_from_basis(factors.v, factors.sigma, k, pivot);
  meter.record(out.diagnostics);
  out.diagnostics.seed = cfg.seed;
  if (factors_out) *factors_out = std::move(factors);
  return out;
}

/// Adjoint-free selection: pivoted QR on the d x m sketch Y = Omega A with
/// Omega having N(0, 1/d) entries, d = k + p. Uses only applies of A^T.
template <typename Scalar>
SelectionResult<Scalar> raf_select(const LinearOperator<Scalar>& a, Index k, Index p,
                                   std::uint64_t seed, PivotMethod pivot = PivotMethod::qrcp()) {
  detail::check_selectable<Scalar>(k, a.in_dim());
  if (p < 0) throw DomainError("raf_select: p must be >= 0");
  const Index d = k + p;
  const detail::ApplyMeter<Scalar> meter(a);
  // Column i of Omega^T is row i of Omega.
  const Matrix<Scalar> omega_t =
      gaussian_matrix<Scalar>(a.out_dim(), d, Scalar(1) / Scalar(d), seed);
  const Matrix<Scalar> y = a.apply_adjoint_columns(omega_t).transpose();
  const Vector<Scalar> sy = singular_values(y);
  if (sy.size() < k || !(sy(k - 1) > Scalar(1e-12) * sy(0))) {
    throw RankDeficiencyError("raf_select: sketch has numerical rank below k");
  }
  const PivotedQr<Scalar> qr = detail::pivot(y, k, pivot);

  SelectionResult<Scalar> out;
  out.indices = qr.selected();
  out.method = "raf";
  meter.record(out.diagnostics);
  out.diagnostics.seed = seed;
  if (pivot.rule == PivotMethod::Rule::srrqr) out.diagnostics.f = static_cast<Scalar>(pivot.f);
  return out;
}

struct HybridConfig {
  Index s = 0;  // 0 selects min(ceil(k log k), m), raised to at least k
  double beta = 0.9;
  PivotMethod pivot = PivotMethod::qrcp();
};

inline Index default_sample_count(Index k, Index m) {
  const auto klogk = static_cast<Index>(std::ceil(static_cast<double>(k) * std::log(static_cast<double>(k))));
  return std::max(k, std::min(klogk, m));
}

/// Two-stage hybrid selection on a given orthonormal V_k (m x k).
///
/// Stage 1 draws s indices with replacement from pi and weights column j of
/// V_k^T S by 1/sqrt(s pi_{i_j}). Stage 2 pivots V_k^T S D down to k columns.
/// The reported indices are the unweighted original columns.
template <typename Derived>
SelectionResult<typename Derived::Scalar> hybrid_select_from_basis(
    const Eigen::MatrixBase<Derived>& v_k, Index k, const HybridConfig& cfg, std::uint64_t seed) {
  using Scalar = typename Derived::Scalar;
  const Index m = v_k.rows();
  detail::check_selectable<Scalar>(k, m);
  if (v_k.cols() != k) throw DimensionError("hybrid_select: V_k must have exactly k columns");
  const Index s = cfg.s == 0 ? default_sample_count(k, m) : cfg.s;
  if (s < k) throw DomainError("hybrid_select: s must be >= k");

  const Vector<Scalar> tau = leverage_scores(v_k);
  const SamplingDistribution<Scalar> dist =
      sampling_distribution(tau, k, m, static_cast<Scalar>(cfg.beta));

  Engine engine = make_engine(seed);
  std::discrete_distribution<Index> draw(dist.pi.data(), dist.pi.data() + m);
  IndexList sampled(static_cast<std::size_t>(s));
  Vector<Scalar> weights(s);
  Matrix<Scalar> sketch(k, s);
  for (Index j = 0; j < s; ++j) {
    const Index i = draw(engine);
    sampled[static_cast<std::size_t>(j)] = i;
    weights(j) = Scalar(1) / std::sqrt(Scalar(s) * dist.pi(i));
    sketch.col(j) = weights(j) * v_k.row(i).transpose();
  }
  const std::set<Index> distinct(sampled.begin(), sampled.end());
  if (static_cast<Index>(distinct.size()) < k) {
    throw ResampleError("hybrid_select: only " + std::to_string(distinct.size()) +
                        " distinct indices among " + std::to_string(s) +
                        " samples; k=" + std::to_string(k) + " needed (retry with another seed)");
  }
  const Vector<Scalar> ss = singular_values(sketch);
  const Scalar sketch_sigma_k = ss(k - 1);
  if (!(sketch_sigma_k > Scalar(1e-12) * ss(0))) {
    throw ResampleError("hybrid_select: sampled columns have rank below k (retry with another seed)");
  }

  const PivotedQr<Scalar> qr = detail::pivot(sketch, k, cfg.pivot);
  SelectionResult<Scalar> out;
  out.method = "hybrid";
  Vector<Scalar> chosen_weights(k);
  std::set<Index> seen;
  for (Index t = 0; t < k; ++t) {
    const Index pos = qr.permutation[static_cast<std::size_t>(t)];
    const Index original = sampled[static_cast<std::size_t>(pos)];
    if (!seen.insert(original).second) {
      throw ResampleError("hybrid_select: stage 2 selected a duplicated sample");
    }
    out.indices.push_back(original);
    chosen_weights(t) = weights(pos);
  }
  out.weights = chosen_weights;

  const Matrix<Scalar> vt = v_k.transpose();
  auto& diag = out.diagnostics;
  diag.v11_inv_norm = inverse_spectral_norm(select_columns(vt, out.indices));
  diag.seed = seed;
  diag.s = s;
  diag.f = static_cast<Scalar>(cfg.pivot.f);
  diag.beta = static_cast<Scalar>(cfg.beta);
  diag.sketch_sigma_k = sketch_sigma_k;
  diag.candidates.assign(distinct.begin(), distinct.end());
  return out;
}

/// Randomized SVD of A, then hybrid selection on the computed V_k. The sketch
/// and the sampling use independent substreams of `seed`.
template <typename Scalar>
SelectionResult<Scalar> hybrid_select(const LinearOperator<Scalar>& a, Index k,
                                      const HybridConfig& cfg, SketchConfig sketch,
                                      std::uint64_t seed,
                                      SvdFactors<Scalar>* factors_out = nullptr) {
  detail::check_selectable<Scalar>(k, a.in_dim());
  sketch.k = k;
  sketch.seed = substream_seed(seed, 0);
  const detail::ApplyMeter<Scalar> meter(a);
  SvdFactors<Scalar> factors = randomized_svd(a, sketch);
  SelectionResult<Scalar> out = hybrid_select_from_basis(factors.v, k, cfg, substream_seed(seed, 1));
  meter.record(out.diagnostics);
  out.diagnostics.seed = seed;
  out.diagnostics.sigma_k = factors.sigma;
  if (factors_out) *factors_out = std::move(factors);
  return out;
}

namespace detail {

// Greedy D-optimal selection over columns supplied by `column(j)`.
// Every step re-extracts each remaining candidate, so the provider is called
// m + (m-1) + ... + (m-k+1) times.
template <typename Scalar, typename ColumnFn>
SelectionResult<Scalar> greedy_core(Index n, Index m, Index k, ColumnFn&& column) {
  check_selectable<Scalar>(k, m);
  Matrix<Scalar> x(n, 0);
  Matrix<Scalar> l(0, 0);  // Cholesky factor of I + X^T X
  std::vector<bool> taken(static_cast<std::size_t>(m), false);
  SelectionResult<Scalar> out;
  out.method = "greedy";

  for (Index t = 0; t < k; ++t) {
    Index best = -1;
    Scalar best_gain = -std::numeric_limits<Scalar>::infinity();
    Vector<Scalar> best_col;
    Vector<Scalar> best_row;
    Scalar best_schur = Scalar(0);
    for (Index j = 0; j < m; ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      Vector<Scalar> a = column(j);
      Vector<Scalar> row = x.transpose() * a;
      if (t > 0) l.template triangularView<Eigen::Lower>().solveInPlace(row);
      // det(I + [X a]^T [X a]) / det(I + X^T X) = 1 + |a|^2 - |L^{-1} X^T a|^2
      const Scalar schur = Scalar(1) + a.squaredNorm() - row.squaredNorm();
      const Scalar gain = std::log(std::max(schur, std::numeric_limits<Scalar>::min()));
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
        best_col = std::move(a);
        best_row = std::move(row);
        best_schur = schur;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    out.indices.push_back(best);
    x.conservativeResize(Eigen::NoChange, t + 1);
    x.col(t) = best_col;
    if (best_schur > Scalar(0)) {
      l.conservativeResize(t + 1, t + 1);
      l.row(t).head(t) = best_row.transpose();
      l.col(t).head(t).setZero();
      l(t, t) = std::sqrt(best_schur);
    } else {
      // Rank-one extension lost definiteness to rounding; refactor.
      const Matrix<Scalar> gram =
          Matrix<Scalar>::Identity(t + 1, t + 1) + x.transpose() * x;
      l = Eigen::LLT<Matrix<Scalar>>(gram).matrixL();
    }
  }
  return out;
}

}  // namespace detail

/// Greedy D-optimal selection on a dense n x m matrix; ties go to the lowest index.
template <typename Derived>
SelectionResult<typename Derived::Scalar> greedy_select(const Eigen::MatrixBase<Derived>& a,
                                                        Index k) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> dense = a.eval();
  return detail::greedy_core<Scalar>(dense.rows(), dense.cols(), k,
                                     [&](Index j) -> Vector<Scalar> { return dense.col(j); });
}

/// Matrix-free greedy selection. Columns are extracted as A e_j, costing
/// m k - k (k - 1) / 2 applies of A in total.
template <typename Scalar>
SelectionResult<Scalar> greedy_select(const LinearOperator<Scalar>& a, Index k) {
  const detail::ApplyMeter<Scalar> meter(a);
  SelectionResult<Scalar> out = detail::greedy_core<Scalar>(
      a.out_dim(), a.in_dim(), k, [&](Index j) -> Vector<Scalar> { return a.column(j); });
  meter.record(out.diagnostics);
  return out;
}

/// Uniform k-subset without replacement, sorted.
template <typename Scalar = double>
SelectionResult<Scalar> random_select(Index m, Index k, std::uint64_t seed) {
  if (k < 0 || k > m) throw DimensionError("random_select: requires 0 <= k <= m");
  SelectionResult<Scalar> out;
  out.indices = uniform_subset(m, k, seed);
  out.method = "random";
  out.diagnostics.seed = seed;
  return out;
}

}  // namespace oedcs
