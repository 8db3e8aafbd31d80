#pragma once

#include <oedcs/errors.hpp>
#include <oedcs/linalg.hpp>
#include <oedcs/linear_operator.hpp>
#include <oedcs/types.hpp>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace oedcs {

/// Linear-Gaussian inverse problem d = F m + eps, eps ~ N(0, eta^2 I),
/// m ~ N(mu_pr, Gamma_pr) with Gamma_pr = G G^T.
template <typename Scalar>
struct BayesModel {
  LinearOperator<Scalar> forward;
  LinearOperator<Scalar> prior_factor;
  std::function<Vector<Scalar>(const Vector<Scalar>&)> prior_precision;  // x -> Gamma_pr^{-1} x
  Vector<Scalar> mu_pr;
  Scalar eta = 1;

  Index parameter_dim() const { return forward.in_dim(); }
  Index sensor_count() const { return forward.out_dim(); }

  void validate() const {
    if (!(eta > Scalar(0))) throw DomainError("BayesModel: eta must be positive");
    if (prior_factor.out_dim() != forward.in_dim() || mu_pr.size() != forward.in_dim()) {
      throw DimensionError("BayesModel: prior and forward dimensions disagree");
    }
  }
};

template <typename Scalar>
struct CompletionResult {
  Vector<Scalar> completed;        // P d
  Vector<Scalar> selected_values;  // S^T d
  Scalar amplification = 0;        // ||(S^T V_k)^{-1}||_2
  std::optional<Scalar> rel_error;
  std::optional<Scalar> bound_value;
};

/// ||x - truth|| / ||truth||.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar relative_error(const Eigen::MatrixBase<DerivedA>& estimate,
                                         const Eigen::MatrixBase<DerivedB>& truth) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar denom = truth.norm();
  if (!(denom > Scalar(0))) throw DomainError("relative_error: truth has zero norm");
  if (estimate.size() != truth.size()) throw DimensionError("relative_error: size mismatch");
  return (estimate - truth).norm() / denom;
}

/// P d = V_k (S^T V_k)^{-1} S^T d with S^T d = `observed`.
template <typename Derived, typename DerivedObs>
CompletionResult<typename Derived::Scalar> bdeim_project(const Eigen::MatrixBase<Derived>& v_k,
                                                         const IndexList& indices,
                                                         const Eigen::MatrixBase<DerivedObs>& observed) {
  using Scalar = typename Derived::Scalar;
  const Index k = v_k.cols();
  if (static_cast<Index>(indices.size()) != k || observed.size() != k) {
    throw DimensionError("bdeim_project: need exactly k indices and k observed values");
  }
  for (Index j : indices) {
    if (j < 0 || j >= v_k.rows()) throw DimensionError("bdeim_project: index out of range");
  }
  Matrix<Scalar> stv(k, k);
  for (Index i = 0; i < k; ++i) stv.row(i) = v_k.row(indices[static_cast<std::size_t>(i)]);
  const Vector<Scalar> sv = singular_values(stv);
  if (!(sv(k - 1) > Scalar(1e-12))) {
    throw SingularityError("bdeim_project: S^T V_k is singular for this selection; re-select sensors");
  }
  const Eigen::FullPivLU<Matrix<Scalar>> lu(stv);
  CompletionResult<Scalar> out;
  out.selected_values = observed;
  out.completed = v_k * lu.solve(out.selected_values);
  out.amplification = Scalar(1) / sv(k - 1);
  return out;
}

/// Sqrt of mu^T Gamma_pr^{-1} mu.
template <typename Scalar>
Scalar prior_norm(const BayesModel<Scalar>& model, const Vector<Scalar>& x) {
  return std::sqrt(std::max(Scalar(0), x.dot(model.prior_precision(x))));
}

/// Dense SPD solver for (eta^{-2} F_S^T F_S + Gamma_pr^{-1}) m = eta^{-2} F_S^T d + Gamma_pr^{-1} mu_pr,
/// where F_S holds the rows `rows` of F (all rows when empty). Built once, reused.
template <typename Scalar>
class PosteriorSolver {
 public:
  explicit PosteriorSolver(const BayesModel<Scalar>& model, const IndexList& rows = {}) {
    model.validate();
    const Index n = model.parameter_dim();
    // F^T densified with m adjoint applies (cheaper than n forward applies).
    const Matrix<Scalar> ft_all = densify(model.forward.adjoint());
    Matrix<Scalar> precision(n, n);
    Vector<Scalar> e = Vector<Scalar>::Zero(n);
    for (Index j = 0; j < n; ++j) {
      e(j) = Scalar(1);
      precision.col(j) = model.prior_precision(e);
      e(j) = Scalar(0);
    }
    init(ft_all, precision, model.mu_pr, model.eta, rows);
  }

  /// From a dense F^T (n x m) and dense Gamma_pr^{-1}.
  PosteriorSolver(const Matrix<Scalar>& ft_all, const Matrix<Scalar>& precision,
                  const Vector<Scalar>& mu_pr, Scalar eta, const IndexList& rows = {}) {
    init(ft_all, precision, mu_pr, eta, rows);
  }

  Vector<Scalar> solve(const Vector<Scalar>& data) const {
    if (data.size() != ft_.cols()) throw DimensionError("PosteriorSolver: data length mismatch");
    const Scalar w = Scalar(1) / (eta_ * eta_);
    return llt_.solve(w * ft_ * data + prior_rhs_);
  }

  /// ||H m - rhs|| / ||rhs||.
  Scalar normal_equation_residual(const Vector<Scalar>& data, const Vector<Scalar>& m) const {
    const Scalar w = Scalar(1) / (eta_ * eta_);
    const Vector<Scalar> rhs = w * ft_ * data + prior_rhs_;
    return (hessian_ * m - rhs).norm() / rhs.norm();
  }

  const Matrix<Scalar>& hessian() const { return hessian_; }

 private:
  void init(const Matrix<Scalar>& ft_all, const Matrix<Scalar>& precision,
            const Vector<Scalar>& mu_pr, Scalar eta, const IndexList& rows) {
    if (!(eta > Scalar(0))) throw DomainError("PosteriorSolver: eta must be positive");
    if (precision.rows() != ft_all.rows() || precision.cols() != ft_all.rows() ||
        mu_pr.size() != ft_all.rows()) {
      throw DimensionError("PosteriorSolver: dimension mismatch");
    }
    for (Index j : rows) {
      if (j < 0 || j >= ft_all.cols()) throw DimensionError("PosteriorSolver: row index out of range");
    }
    eta_ = eta;
    ft_ = rows.empty() ? ft_all : select_columns(ft_all, rows);
    precision_ = Scalar(0.5) * (precision + precision.transpose());
    prior_rhs_ = precision_ * mu_pr;
    const Scalar w = Scalar(1) / (eta_ * eta_);
    hessian_ = w * ft_ * ft_.transpose() + precision_;
    llt_.compute(hessian_);
    if (llt_.info() != Eigen::Success) {
      throw SingularityError("PosteriorSolver: posterior precision is not positive definite");
    }
  }

  Scalar eta_ = 1;
  Matrix<Scalar> ft_;
  Matrix<Scalar> precision_;
  Vector<Scalar> prior_rhs_;
  Matrix<Scalar> hessian_;
  Eigen::LLT<Matrix<Scalar>> llt_;
};

/// Posterior mean (= MAP point) for data observed at every sensor.
template <typename Scalar>
Vector<Scalar> map_estimate(const BayesModel<Scalar>& model, const Vector<Scalar>& data) {
  return PosteriorSolver<Scalar>(model).solve(data);
}

/// MAP point computed from the completed data P d.
template <typename Scalar, typename Derived>
Vector<Scalar> approx_map_estimate(const PosteriorSolver<Scalar>& solver,
                                   const Eigen::MatrixBase<Derived>& v_k, const IndexList& indices,
                                   const Vector<Scalar>& observed) {
  return solver.solve(bdeim_project(v_k, indices, observed).completed);
}

template <typename Scalar, typename Derived>
Vector<Scalar> approx_map_estimate(const BayesModel<Scalar>& model,
                                   const Eigen::MatrixBase<Derived>& v_k, const IndexList& indices,
                                   const Vector<Scalar>& observed) {
  return approx_map_estimate(PosteriorSolver<Scalar>(model), v_k, indices, observed);
}

/// amplification * (||Sigma_perp||_F + ||Sigma_perp||_2 ||mu_pr||_{Gamma_pr^{-1}} + sqrt(m - k)).
template <typename Derived>
typename Derived::Scalar completion_bound(const Eigen::MatrixBase<Derived>& residual_sigma,
                                          typename Derived::Scalar amplification,
                                          typename Derived::Scalar mu_prior_norm, Index m, Index k) {
  using Scalar = typename Derived::Scalar;
  if (k < 0 || k >= m) throw DimensionError("completion_bound: requires k < m");
  if (!(amplification >= Scalar(0)) || !(mu_prior_norm >= Scalar(0))) {
    throw DomainError("completion_bound: amplification and prior norm must be nonnegative");
  }
  const Scalar fro = residual_sigma.norm();
  const Scalar spec = residual_sigma.size() > 0 ? residual_sigma.cwiseAbs().maxCoeff() : Scalar(0);
  return amplification * (fro + spec * mu_prior_norm + std::sqrt(Scalar(m - k)));
}

}  // namespace oedcs
