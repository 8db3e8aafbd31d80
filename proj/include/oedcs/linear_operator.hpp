#pragma once

#include <oedcs/errors.hpp>
#include <oedcs/random.hpp>
#include <oedcs/types.hpp>

#include <Eigen/SparseCore>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>

namespace oedcs {

/// Matrix-free linear map R^in_dim -> R^out_dim with an adjoint.
///
/// Copies share the underlying maps and counters. `adjoint()` returns a view
/// whose forward map is this operator's adjoint; counters are shared as well,
/// so every evaluation is attributed to the physical map that ran.
template <typename Scalar>
class LinearOperator {
 public:
  using VectorType = Vector<Scalar>;
  using MatrixType = Matrix<Scalar>;
  using Map = std::function<VectorType(const VectorType&)>;

  LinearOperator() = default;

  LinearOperator(Index out_dim, Index in_dim, Map apply, Map apply_adjoint)
      : state_(std::make_shared<State>(out_dim, in_dim, std::move(apply),
                                       std::move(apply_adjoint))) {
    if (out_dim < 0 || in_dim < 0) throw DimensionError("LinearOperator: negative dimension");
  }

  Index out_dim() const { return transposed_ ? state_->in_dim : state_->out_dim; }
  Index in_dim() const { return transposed_ ? state_->out_dim : state_->in_dim; }
  Index rows() const { return out_dim(); }
  Index cols() const { return in_dim(); }

  VectorType apply(const VectorType& x) const {
    return transposed_ ? run_adjoint(x) : run_forward(x);
  }
  VectorType apply_adjoint(const VectorType& y) const {
    return transposed_ ? run_forward(y) : run_adjoint(y);
  }

  /// One apply per column of `x`.
  MatrixType apply_columns(const MatrixType& x) const {
    if (x.rows() != in_dim()) throw DimensionError("apply_columns: row count != in_dim");
    MatrixType out(out_dim(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) out.col(j) = apply(x.col(j));
    return out;
  }
  MatrixType apply_adjoint_columns(const MatrixType& y) const {
    if (y.rows() != out_dim()) throw DimensionError("apply_adjoint_columns: row count != out_dim");
    MatrixType out(in_dim(), y.cols());
    for (Index j = 0; j < y.cols(); ++j) out.col(j) = apply_adjoint(y.col(j));
    return out;
  }

  /// Column j, i.e. apply(e_j). Costs one apply.
  VectorType column(Index j) const {
    if (j < 0 || j >= in_dim()) throw DimensionError("column: index out of range");
    VectorType e = VectorType::Zero(in_dim());
    e(j) = Scalar(1);
    return apply(e);
  }

  LinearOperator adjoint() const {
    LinearOperator view = *this;
    view.transposed_ = !transposed_;
    return view;
  }

  std::uint64_t forward_count() const {
    return transposed_ ? state_->adjoint_count.load() : state_->forward_count.load();
  }
  std::uint64_t adjoint_count() const {
    return transposed_ ? state_->forward_count.load() : state_->adjoint_count.load();
  }
  void reset_counts() const {
    state_->forward_count = 0;
    state_->adjoint_count = 0;
  }

  bool valid() const { return static_cast<bool>(state_); }

 private:
  struct State {
    State(Index out, Index in, Map f, Map a)
        : out_dim(out), in_dim(in), forward(std::move(f)), adjoint(std::move(a)) {}
    Index out_dim;
    Index in_dim;
    Map forward;
    Map adjoint;
    std::atomic<std::uint64_t> forward_count{0};
    std::atomic<std::uint64_t> adjoint_count{0};
  };

  VectorType run_forward(const VectorType& x) const {
    if (x.size() != state_->in_dim) {
      throw DimensionError("apply: got length " + std::to_string(x.size()) + ", expected " +
                           std::to_string(state_->in_dim));
    }
    ++state_->forward_count;
    VectorType y = state_->forward(x);
    if (y.size() != state_->out_dim) throw DimensionError("apply: map returned wrong length");
    return y;
  }
  VectorType run_adjoint(const VectorType& y) const {
    if (y.size() != state_->out_dim) {
      throw DimensionError("apply_adjoint: got length " + std::to_string(y.size()) +
                           ", expected " + std::to_string(state_->out_dim));
    }
    ++state_->adjoint_count;
    VectorType x = state_->adjoint(y);
    if (x.size() != state_->in_dim) throw DimensionError("apply_adjoint: map returned wrong length");
    return x;
  }

  std::shared_ptr<State> state_;
  bool transposed_ = false;
};

template <typename Derived>
LinearOperator<typename Derived::Scalar> make_dense_operator(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using V = Vector<Scalar>;
  auto mat = std::make_shared<const Matrix<Scalar>>(m);
  return LinearOperator<Scalar>(
      mat->rows(), mat->cols(), [mat](const V& x) -> V { return *mat * x; },
      [mat](const V& y) -> V { return mat->transpose() * y; });
}

template <typename Scalar>
LinearOperator<Scalar> make_sparse_operator(Eigen::SparseMatrix<Scalar> m) {
  using V = Vector<Scalar>;
  m.makeCompressed();
  auto mat = std::make_shared<const Eigen::SparseMatrix<Scalar>>(std::move(m));
  return LinearOperator<Scalar>(
      mat->rows(), mat->cols(), [mat](const V& x) -> V { return *mat * x; },
      [mat](const V& y) -> V { return mat->transpose() * y; });
}

template <typename Derived>
LinearOperator<typename Derived::Scalar> make_diagonal_operator(
    const Eigen::MatrixBase<Derived>& diag) {
  using Scalar = typename Derived::Scalar;
  using V = Vector<Scalar>;
  auto d = std::make_shared<const V>(diag);
  return LinearOperator<Scalar>(
      d->size(), d->size(), [d](const V& x) -> V { return d->cwiseProduct(x); },
      [d](const V& y) -> V { return d->cwiseProduct(y); });
}

template <typename Scalar>
LinearOperator<Scalar> make_identity_operator(Index n) {
  using V = Vector<Scalar>;
  return LinearOperator<Scalar>(
      n, n, [](const V& x) -> V { return x; }, [](const V& y) -> V { return y; });
}

/// Noise-whitened, prior-preconditioned operator with columns indexed by
/// candidate sensors. `prior_factor` is a G with G G^T = Gamma_pr.
template <typename Scalar>
struct PreconditionedOperator {
  LinearOperator<Scalar> op;
  LinearOperator<Scalar> forward;
  LinearOperator<Scalar> prior_factor;
  Scalar eta;

  Index parameter_dim() const { return op.out_dim(); }
  Index sensor_count() const { return op.in_dim(); }
};

/// A = eta^{-1} G^T F^T, so that A^T A = eta^{-2} F Gamma_pr F^T for any factor
/// G G^T = Gamma_pr. For a symmetric factor this is eta^{-1} Gamma_pr^{1/2} F^T.
/// apply(x) = eta^{-1} G^T (F^T x), apply_adjoint(y) = eta^{-1} F (G y); each
/// call costs exactly one adjoint (resp. forward) apply of F.
template <typename Scalar>
PreconditionedOperator<Scalar> compose_preconditioned(const LinearOperator<Scalar>& forward,
                                                      const LinearOperator<Scalar>& prior_factor,
                                                      Scalar eta) {
  using V = Vector<Scalar>;
  if (!(eta > Scalar(0))) throw DomainError("compose_preconditioned: eta must be positive");
  if (prior_factor.out_dim() != forward.in_dim()) {
    throw DimensionError("compose_preconditioned: prior factor out_dim must equal F.in_dim");
  }
  const Scalar inv_eta = Scalar(1) / eta;
  LinearOperator<Scalar> a(
      prior_factor.in_dim(), forward.out_dim(),
      [forward, prior_factor, inv_eta](const V& x) -> V {
        return inv_eta * prior_factor.apply_adjoint(forward.apply_adjoint(x));
      },
      [forward, prior_factor, inv_eta](const V& y) -> V {
        return inv_eta * forward.apply(prior_factor.apply(y));
      });
  return {a, forward, prior_factor, eta};
}

/// Largest operator `densify` accepts.
struct DensifyLimits {
  Index max_in_dim = 100000;
  Index max_entries = 50000000;
};

/// Column j = apply(e_j); consumes exactly in_dim applies.
template <typename Scalar>
Matrix<Scalar> densify(const LinearOperator<Scalar>& op, DensifyLimits limits = {}) {
  if (op.in_dim() > limits.max_in_dim || op.out_dim() * op.in_dim() > limits.max_entries) {
    throw DimensionError("densify: operator " + std::to_string(op.out_dim()) + "x" +
                         std::to_string(op.in_dim()) + " exceeds the desk-scale size guard");
  }
  Matrix<Scalar> out(op.out_dim(), op.in_dim());
  for (Index j = 0; j < op.in_dim(); ++j) out.col(j) = op.column(j);
  return out;
}

/// max over trials of |<Ax, y> - <x, A^T y>| / (||Ax|| ||y||) on seeded Gaussian probes.
template <typename Scalar>
Scalar adjoint_consistency_check(const LinearOperator<Scalar>& op, Index trials,
                                 std::uint64_t seed) {
  if (trials < 1) throw DomainError("adjoint_consistency_check: trials must be >= 1");
  Scalar worst = Scalar(0);
  for (Index t = 0; t < trials; ++t) {
    const Vector<Scalar> x = gaussian_vector<Scalar>(op.in_dim(), substream_seed(seed, 2 * t));
    const Vector<Scalar> y =
        gaussian_vector<Scalar>(op.out_dim(), substream_seed(seed, 2 * t + 1));
    const Vector<Scalar> ax = op.apply(x);
    const Vector<Scalar> aty = op.apply_adjoint(y);
    const Scalar scale = std::max(ax.norm() * y.norm(), x.norm() * aty.norm());
    if (scale == Scalar(0)) continue;
    worst = std::max(worst, std::abs(ax.dot(y) - x.dot(aty)) / scale);
  }
  return worst;
}

}  // namespace oedcs
