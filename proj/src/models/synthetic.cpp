#include <oedcs/errors.hpp>
#include <oedcs/models.hpp>
#include <oedcs/random.hpp>

#include <Eigen/QR>

namespace oedcs {

namespace {

MatrixXd random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  const MatrixXd g = gaussian_matrix<double>(rows, cols, 1.0, seed);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(rows, cols);
  // Fix signs so the factor is a deterministic function of g.
  const MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace

SyntheticModel build_synthetic(Index n, Index m, const VectorXd& spectrum, std::uint64_t seed) {
  const Index r = spectrum.size();
  if (r < 1 || r > std::min(n, m)) throw DimensionError("build_synthetic: need 1 <= |spectrum| <= min(n, m)");
  for (Index i = 0; i < r; ++i) {
    if (!(spectrum(i) > 0.0)) throw DomainError("build_synthetic: spectrum must be positive");
    if (i > 0 && spectrum(i) > spectrum(i - 1)) throw DomainError("build_synthetic: spectrum must be nonincreasing");
  }
  const MatrixXd u = random_orthonormal(n, r, substream_seed(seed, 0));
  const MatrixXd v = random_orthonormal(m, r, substream_seed(seed, 1));
  SyntheticModel model;
  model.matrix = u * spectrum.asDiagonal() * v.transpose();
  model.op = make_dense_operator(model.matrix);
  model.factors.u = u;
  model.factors.sigma = spectrum;
  model.factors.v = v;
  model.factors.residual_sigma = VectorXd::Zero(std::min(n, m) - r);
  return model;
}

}  // namespace oedcs
