#include <oedcs/errors.hpp>
#include <oedcs/models.hpp>

#include <Eigen/SparseCholesky>

#include <memory>

namespace oedcs {

namespace {

// Implicit Euler (I - dt L) u_{t+1} = u_t. With W the trapezoid weights,
// S = W (I - dt L) is symmetric positive definite, so each step is
// u <- S^{-1} (W u) and its transpose is v <- W (S^{-1} v).
struct HeatPropagator {
  Eigen::SimplicialLDLT<SparseMatrixXd> solver;
  VectorXd weights;
  Index steps = 0;
};

}  // namespace

LinearOperator<double> build_heat2d(const Grid2D& grid, const SensorLayout& layout,
                                    double final_time, Index steps) {
  if (steps < 1) throw DomainError("build_heat2d: steps must be >= 1");
  if (!(final_time > 0.0)) throw DomainError("build_heat2d: final time must be positive");
  const Index n = grid.size();
  const Index m = layout.size();
  if (m < 1 || m > n) throw DimensionError("build_heat2d: need 1 <= sensors <= nodes");
  for (Index node : layout.nodes) {
    if (node < 0 || node >= n) throw DimensionError("build_heat2d: sensor node out of range");
  }

  const double dt = final_time / static_cast<double>(steps);
  auto prop = std::make_shared<HeatPropagator>();
  prop->weights = trapezoid_weights(grid);
  prop->steps = steps;
  SparseMatrixXd id(n, n);
  id.setIdentity();
  const SparseMatrixXd s = prop->weights.asDiagonal() * (id - dt * neumann_laplacian(grid));
  prop->solver.compute(s);
  if (prop->solver.info() != Eigen::Success) {
    throw NumericalError("build_heat2d: time-step matrix factorization failed");
  }
  auto nodes = std::make_shared<const IndexList>(layout.nodes);

  auto forward = [prop, nodes](const VectorXd& u0) -> VectorXd {
    VectorXd u = u0;
    VectorXd rhs(u.size());
    for (Index t = 0; t < prop->steps; ++t) {
      // Separate buffers: the solve must not alias its right-hand side.
      rhs = prop->weights.cwiseProduct(u);
      u = prop->solver.solve(rhs);
    }
    return select_entries(u, *nodes);
  };
  auto adjoint = [prop, nodes, n](const VectorXd& y) -> VectorXd {
    VectorXd v = VectorXd::Zero(n);
    for (std::size_t i = 0; i < nodes->size(); ++i) v((*nodes)[i]) += y(static_cast<Index>(i));
    VectorXd tmp(n);
    for (Index t = 0; t < prop->steps; ++t) {
      tmp = prop->solver.solve(v);
      v = prop->weights.cwiseProduct(tmp);
    }
    return v;
  };
  return LinearOperator<double>(m, n, forward, adjoint);
}

}  // namespace oedcs
