#include "oracles.hpp"

#include <oedcs/errors.hpp>
#include <oedcs/linalg.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace oedcs;

namespace {

double max_coupling(const PivotedQr<double>& qr) {
  const MatrixXd r11 = qr.r11();
  const MatrixXd c = r11.triangularView<Eigen::Upper>().solve(qr.r12());
  return c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
}

void expect_factorization(const MatrixXd& m, const PivotedQr<double>& qr, double tol) {
  const MatrixXd mp = oracle::columns(m, qr.permutation);
  EXPECT_LE((qr.q * qr.r - mp).norm(), tol * std::max(1.0, m.norm()));
  EXPECT_LE((qr.q.transpose() * qr.q - MatrixXd::Identity(qr.q.cols(), qr.q.cols())).norm(), tol);
  for (Index i = 0; i < qr.r.rows(); ++i) {
    EXPECT_GE(qr.r(i, i), 0.0);
    for (Index j = 0; j < std::min(i, qr.r.cols()); ++j) EXPECT_EQ(qr.r(i, j), 0.0);
  }
}

}  // namespace

TEST(Qrcp, IdentityKeepsOrder) {
  const auto qr = qrcp(MatrixXd::Identity(3, 3), 3);
  EXPECT_EQ(qr.permutation, (IndexList{0, 1, 2}));
  EXPECT_LE((qr.r - MatrixXd::Identity(3, 3)).norm(), 1e-15);
}

TEST(Qrcp, PicksOnlyNonzeroColumn) {
  MatrixXd m(2, 2);
  m << 0, 2, 0, 0;
  const auto qr = qrcp(m, 1);
  EXPECT_EQ(qr.permutation[0], 1);
  EXPECT_NEAR(qr.r(0, 0), 2.0, 1e-15);
}

TEST(Qrcp, MatchesExplicitProjectionGreedy) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const MatrixXd m = oracle::random_matrix(6, 6, seed);
    const auto qr = qrcp(m, 6);
    EXPECT_EQ(qr.permutation, oracle::greedy_pivots(m, 6)) << "seed " << seed;
    expect_factorization(m, qr, 1e-12);
  }
}

TEST(Qrcp, WideMatrixPartialPivoting) {
  const MatrixXd m = oracle::random_matrix(4, 11, 5);
  const auto qr = qrcp(m, 3);
  const IndexList greedy = oracle::greedy_pivots(m, 3);
  EXPECT_EQ(qr.selected(), greedy);
  expect_factorization(m, qr, 1e-12);
}

TEST(Qrcp, TiesGoToLowestIndex) {
  // Columns 1 and 3 share the largest norm.
  MatrixXd m(2, 4);
  m << 0.5, 0, 0.1, 3, 0, 3, 0, 0;
  EXPECT_EQ(qrcp(m, 1).permutation[0], 1);
}

TEST(Qrcp, DiagonalNonincreasing) {
  for (std::uint32_t seed = 0; seed < 30; ++seed) {
    const MatrixXd m = oracle::random_matrix(7, 12, 100 + seed);
    const auto qr = qrcp(m, 7);
    for (Index i = 1; i < qr.r.rows(); ++i) EXPECT_LE(qr.r(i, i), qr.r(i - 1, i - 1) * (1 + 1e-12));
  }
}

TEST(Qrcp, RejectsBadK) {
  EXPECT_THROW(qrcp(MatrixXd::Identity(3, 3), 4), DimensionError);
  EXPECT_THROW(qrcp(MatrixXd::Identity(3, 3), -1), DimensionError);
}

TEST(Srrqr, OrthonormalRowsKeepLeadingBlock) {
  MatrixXd m = MatrixXd::Zero(3, 7);
  m.leftCols(3) = MatrixXd::Identity(3, 3);
  const auto qr = srrqr(m, 3, 1.0);
  EXPECT_EQ(qr.selected(), (IndexList{0, 1, 2}));
  EXPECT_EQ(max_coupling(qr), 0.0);
}

TEST(Srrqr, KahanMatrixSatisfiesBothInequalities) {
  const MatrixXd m = oracle::kahan(8, 1.2);
  const double f = 2.0;
  const auto qr = srrqr(m, 4, f);
  expect_factorization(m, qr, 1e-12);
  EXPECT_LE(max_coupling(qr), f * (1 + 1e-8));
  const VectorXd sm = oracle::svd_values(m);
  const VectorXd s11 = oracle::svd_values(qr.r11());
  const double qf = std::sqrt(1 + f * f * 4 * 4);
  for (Index i = 0; i < 4; ++i) EXPECT_GE(s11(i), sm(i) / qf * (1 - 1e-8));
}

TEST(Srrqr, TightFactorLowerBound) {
  const MatrixXd m = oracle::random_matrix(5, 10, 0);
  const double f = 1.001;
  const auto qr = srrqr(m, 3, f);
  const double rhs = oracle::svd_values(m)(2) / std::sqrt(1 + f * f * 3 * 7);
  EXPECT_GE(oracle::svd_values(qr.r11())(2), rhs);
  EXPECT_LE(max_coupling(qr), f * (1 + 1e-8));
}

TEST(Srrqr, RandomPostconditionsAndInterlacing) {
  std::mt19937 gen(42);
  for (int trial = 0; trial < 40; ++trial) {
    const Index rows = 3 + static_cast<Index>(gen() % 8);
    const Index cols = rows + static_cast<Index>(gen() % 20);
    const Index k = 1 + static_cast<Index>(gen() % static_cast<std::uint32_t>(rows));
    const double f = trial % 2 ? 1.01 : 2.0;
    const MatrixXd m = oracle::random_matrix(rows, cols, 1000 + static_cast<std::uint32_t>(trial));
    const auto qr = srrqr(m, k, f);
    EXPECT_LE(max_coupling(qr), f * (1 + 1e-8));
    const VectorXd sm = oracle::svd_values(m);
    const VectorXd s11 = oracle::svd_values(qr.r11());
    const double qf = std::sqrt(1 + f * f * double(k) * double(cols - k));
    for (Index i = 0; i < k; ++i) {
      EXPECT_GE(s11(i), sm(i) / qf * (1 - 1e-8));
      EXPECT_LE(s11(i), sm(i) * (1 + 1e-10));
    }
  }
}

TEST(Srrqr, Errors) {
  EXPECT_THROW(srrqr(MatrixXd::Identity(3, 3), 2, 0.5), DomainError);
  MatrixXd low = MatrixXd::Zero(3, 5);
  low(0, 0) = 1;
  EXPECT_THROW(srrqr(low, 2, 2.0), RankDeficiencyError);
}

TEST(PhiD, Spectra) {
  EXPECT_EQ(phi_d(VectorXd::Zero(3)), 0.0);
  EXPECT_NEAR(phi_d(VectorXd::Ones(5)), 5 * std::log(2.0), 1e-14);
  EXPECT_NEAR(phi_d(VectorXd((VectorXd(2) << 2, 1).finished())), std::log(10.0), 1e-14);
  EXPECT_THROW(phi_d(VectorXd::Constant(1, -1.0)), DomainError);
}

TEST(PhiD, OfMatrix) {
  EXPECT_EQ(phi_d_of_matrix(MatrixXd::Zero(6, 3)), 0.0);
  MatrixXd e = MatrixXd::Zero(6, 3);
  e.topRows(3) = MatrixXd::Identity(3, 3);
  EXPECT_NEAR(phi_d_of_matrix(e), 3 * std::log(2.0), 1e-14);
  const MatrixXd c = oracle::random_matrix(7, 3, 9);
  EXPECT_NEAR(phi_d_of_matrix(c), oracle::phi_of(c), 1e-12);
}

TEST(PhiD, SylvesterAndMonotone) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const MatrixXd c = oracle::random_matrix(4 + seed % 5, 2 + seed % 7, seed);
    EXPECT_NEAR(phi_d_of_matrix(c), phi_d_of_matrix(MatrixXd(c.transpose())), 1e-10);
    MatrixXd wider(c.rows(), c.cols() + 1);
    wider << c, oracle::random_matrix(c.rows(), 1, seed + 500);
    EXPECT_GE(phi_d_of_matrix(wider), phi_d_of_matrix(c) - 1e-12);
  }
}

TEST(InverseSpectralNorm, Values) {
  EXPECT_NEAR(inverse_spectral_norm(MatrixXd::Identity(4, 4)), 1.0, 1e-15);
  EXPECT_NEAR(inverse_spectral_norm(MatrixXd(VectorXd((VectorXd(2) << 1, 0.5).finished()).asDiagonal())), 2.0, 1e-15);
  MatrixXd s(2, 2);
  s << 1, 2, 2, 4;
  EXPECT_TRUE(std::isinf(inverse_spectral_norm(s)));
  EXPECT_THROW(inverse_spectral_norm(MatrixXd::Zero(2, 3)), DimensionError);
}

TEST(QfFactor, Values) {
  EXPECT_EQ(qf_factor(5, 5, 1.0), 1.0);
  EXPECT_NEAR(qf_factor(100, 30, 1.0), std::sqrt(2101.0), 1e-12);
  EXPECT_NEAR(qf_factor(256, 50, 2.0), std::sqrt(1.0 + 4 * 50 * 206), 1e-10);
  EXPECT_THROW(qf_factor(5, 6, 1.0), DimensionError);
  EXPECT_THROW(qf_factor(5, 2, 0.9), DomainError);
}

TEST(Float, SinglePrecisionInstantiation) {
  const Eigen::MatrixXf m = oracle::random_matrix(5, 9, 3).cast<float>();
  const auto qr = srrqr(m, 3, 2.0f);
  EXPECT_EQ(qr.selected().size(), 3u);
  EXPECT_NEAR(phi_d_of_matrix(m), static_cast<float>(oracle::phi_of(m.cast<double>())), 1e-3f);
  EXPECT_GT(inverse_spectral_norm(qr.r11()), 0.0f);
}
