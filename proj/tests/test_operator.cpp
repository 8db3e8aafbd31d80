#include "oracles.hpp"

#include <oedcs/errors.hpp>
#include <oedcs/linear_operator.hpp>
#include <oedcs/models.hpp>

#include <gtest/gtest.h>

using namespace oedcs;

namespace {

LinearOperator<double> wrong_adjoint(const MatrixXd& m) {
  // Adjoint applies M instead of M^T (square M).
  return LinearOperator<double>(
      m.rows(), m.cols(), [m](const VectorXd& x) -> VectorXd { return m * x; },
      [m](const VectorXd& y) -> VectorXd { return m * y; });
}

}  // namespace

TEST(LinearOperator, DenseApplyAndCounts) {
  const MatrixXd m = oracle::random_matrix(4, 6, 1);
  const auto op = make_dense_operator(m);
  EXPECT_EQ(op.out_dim(), 4);
  EXPECT_EQ(op.in_dim(), 6);
  const VectorXd x = oracle::random_matrix(6, 1, 2);
  const VectorXd y = oracle::random_matrix(4, 1, 3);
  EXPECT_LE((op.apply(x) - m * x).norm(), 1e-14);
  EXPECT_LE((op.apply_adjoint(y) - m.transpose() * y).norm(), 1e-14);
  EXPECT_EQ(op.forward_count(), 1u);
  EXPECT_EQ(op.adjoint_count(), 1u);
  op.apply_columns(MatrixXd::Ones(6, 3));
  EXPECT_EQ(op.forward_count(), 4u);
  op.reset_counts();
  EXPECT_EQ(op.forward_count() + op.adjoint_count(), 0u);
}

TEST(LinearOperator, AdjointViewSharesCounters) {
  const MatrixXd m = oracle::random_matrix(3, 5, 4);
  const auto op = make_dense_operator(m);
  const auto t = op.adjoint();
  EXPECT_EQ(t.out_dim(), 5);
  const VectorXd y = VectorXd::Ones(3);
  EXPECT_LE((t.apply(y) - m.transpose() * y).norm(), 1e-14);
  EXPECT_EQ(op.adjoint_count(), 1u);
  EXPECT_EQ(op.forward_count(), 0u);
  const auto copy = op;
  copy.apply(VectorXd::Ones(5));
  EXPECT_EQ(op.forward_count(), 1u);
}

TEST(LinearOperator, DimensionChecks) {
  const auto op = make_dense_operator(MatrixXd::Identity(3, 3));
  EXPECT_THROW(op.apply(VectorXd::Ones(4)), DimensionError);
  EXPECT_THROW(op.apply_adjoint(VectorXd::Ones(2)), DimensionError);
  EXPECT_THROW(op.column(3), DimensionError);
}

TEST(Compose, ScalarChains) {
  const auto id = make_identity_operator<double>(4);
  const auto a = compose_preconditioned(id, id, 2.0);
  const VectorXd x = oracle::random_matrix(4, 1, 5);
  EXPECT_LE((a.op.apply(x) - x / 2).norm(), 1e-15);

  const auto f = make_diagonal_operator(VectorXd::Constant(1, 3.0));
  const auto g = make_diagonal_operator(VectorXd::Constant(1, 2.0));
  const MatrixXd dense = densify(compose_preconditioned(f, g, 1.0).op);
  EXPECT_NEAR(dense(0, 0), 6.0, 1e-15);
  EXPECT_THROW(compose_preconditioned(f, g, 0.0), DomainError);
}

TEST(Compose, MatchesDenseAssemblyOnHeat) {
  const Grid2D grid(9);
  const SensorLayout layout = sensor_lattice(grid, 4);
  const auto f = build_heat2d(grid, layout, 0.01, 20);
  const Prior prior = build_prior(grid, 80.0, 0.1);
  const double eta = 0.03;
  const auto a = compose_preconditioned(f, prior.factor, eta);
  const MatrixXd fd = densify(f);
  const MatrixXd gd = densify(prior.factor);
  const MatrixXd expected = (gd.transpose() * fd.transpose()) / eta;
  const MatrixXd got = densify(a.op);
  EXPECT_LE((got - expected).norm(), 1e-10 * expected.norm());
  // A^T A does not depend on which factor of Gamma_pr is used.
  const MatrixXd gram = fd * prior.covariance() * fd.transpose() / (eta * eta);
  EXPECT_LE((got.transpose() * got - gram).norm(), 1e-8 * gram.norm());
}

TEST(Densify, KnownOperators) {
  EXPECT_LE((densify(make_identity_operator<double>(5)) - MatrixXd::Identity(5, 5)).norm(), 0.0);
  const VectorXd d = (VectorXd(3) << 1, 2, 3).finished();
  EXPECT_LE((densify(make_diagonal_operator(d)) - MatrixXd(d.asDiagonal())).norm(), 0.0);
}

TEST(Densify, ComposedMatchesColumnwiseDefinition) {
  const MatrixXd b = oracle::random_matrix(5, 7, 8);
  const MatrixXd c = oracle::random_matrix(7, 4, 9);
  const auto bop = make_dense_operator(b);
  const auto cop = make_dense_operator(c);
  const LinearOperator<double> composed(
      5, 4, [&](const VectorXd& x) -> VectorXd { return bop.apply(cop.apply(x)); },
      [&](const VectorXd& y) -> VectorXd { return cop.apply_adjoint(bop.apply_adjoint(y)); });
  const MatrixXd got = densify(composed);
  EXPECT_EQ(composed.forward_count(), 4u);
  for (Index j = 0; j < 4; ++j) {
    VectorXd e = VectorXd::Zero(4);
    e(j) = 1;
    EXPECT_LE((got.col(j) - b * (c * e)).norm(), 1e-13);
  }
}

TEST(Densify, SizeGuard) {
  const LinearOperator<double> huge(
      10, 200000, [](const VectorXd&) -> VectorXd { return VectorXd::Zero(10); },
      [](const VectorXd&) -> VectorXd { return VectorXd::Zero(200000); });
  EXPECT_THROW(densify(huge), DimensionError);
}

TEST(AdjointCheck, IdentityAndBroken) {
  EXPECT_EQ(adjoint_consistency_check(make_identity_operator<double>(6), 5, 1), 0.0);
  const MatrixXd m = oracle::random_matrix(6, 6, 11);
  EXPECT_LE(adjoint_consistency_check(make_dense_operator(m), 10, 2), 1e-14);
  EXPECT_GE(adjoint_consistency_check(wrong_adjoint(m), 10, 2), 1e-2);
}

TEST(AdjointCheck, SparseOperator) {
  Eigen::SparseMatrix<double> s(4, 5);
  s.insert(0, 1) = 2.0;
  s.insert(3, 4) = -1.0;
  s.insert(2, 0) = 0.5;
  const auto op = make_sparse_operator(s);
  EXPECT_LE(adjoint_consistency_check(op, 5, 3), 1e-15);
  EXPECT_LE((densify(op) - MatrixXd(s)).norm(), 0.0);
}

TEST(LinearOperator, FloatInstantiation) {
  const Eigen::MatrixXf m = oracle::random_matrix(3, 4, 12).cast<float>();
  const auto op = make_dense_operator(m);
  EXPECT_LE(adjoint_consistency_check(op, 4, 1), 1e-5f);
  EXPECT_LE((densify(op) - m).norm(), 1e-6f);
}
