#include <oedcs/errors.hpp>
#include <oedcs/models.hpp>

#include <Eigen/SparseCholesky>

#include <cmath>
#include <memory>

namespace oedcs {

Prior build_prior(const Grid2D& grid, double kappa2, double alpha) {
  if (!(kappa2 > 0.0) || !(alpha > 0.0)) throw DomainError("build_prior: kappa2 and alpha must be positive");
  const Index n = grid.size();
  const double h = grid.spacing();
  Prior prior;
  prior.kappa2 = kappa2;
  prior.alpha = alpha;
  prior.mass = trapezoid_weights(grid) * h * h;

  SparseMatrixXd id(n, n);
  id.setIdentity();
  // M (kappa2 - L) is symmetric because W L is.
  prior.stiffness = prior.mass.asDiagonal() * (kappa2 * id - neumann_laplacian(grid));
  prior.stiffness.makeCompressed();

  auto solver = std::make_shared<Eigen::SimplicialLDLT<SparseMatrixXd>>(prior.stiffness);
  if (solver->info() != Eigen::Success) throw NumericalError("build_prior: stiffness factorization failed");
  auto sqrt_mass = std::make_shared<const VectorXd>(prior.mass.cwiseSqrt());
  auto mass = std::make_shared<const VectorXd>(prior.mass);
  auto stiffness = std::make_shared<const SparseMatrixXd>(prior.stiffness);
  const double scale = 1.0 / std::sqrt(alpha);

  prior.factor = LinearOperator<double>(
      n, n,
      [solver, sqrt_mass, scale](const VectorXd& x) -> VectorXd {
        return scale * solver->solve(sqrt_mass->cwiseProduct(x));
      },
      [solver, sqrt_mass, scale](const VectorXd& y) -> VectorXd {
        return scale * sqrt_mass->cwiseProduct(solver->solve(y));
      });
  prior.precision = [stiffness, mass, alpha](const VectorXd& x) -> VectorXd {
    const VectorXd kx = *stiffness * x;
    return alpha * (*stiffness * kx.cwiseQuotient(*mass));
  };
  return prior;
}

MatrixXd Prior::covariance() const {
  const MatrixXd g = densify(factor);
  return g * g.transpose();
}

MatrixXd Prior::precision_matrix() const {
  const MatrixXd k = MatrixXd(stiffness);
  return alpha * k * mass.cwiseInverse().asDiagonal() * k;
}

}  // namespace oedcs
