#include "oracles.hpp"

#include <oedcs/criteria.hpp>
#include <oedcs/errors.hpp>
#include <oedcs/selection.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace oedcs;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inv_norm_oracle(const MatrixXd& m) {
  const VectorXd s = oracle::svd_values(m);
  return s(s.size() - 1) <= 1e-14 * s(0) ? kInf : 1.0 / s(s.size() - 1);
}

}  // namespace

TEST(EvaluateDesign, EmptyAllAndGram) {
  const MatrixXd a = oracle::random_matrix(6, 9, 1);
  EXPECT_EQ(evaluate_design(a, {}), 0.0);
  IndexList all(9);
  for (Index j = 0; j < 9; ++j) all[static_cast<std::size_t>(j)] = j;
  EXPECT_NEAR(evaluate_design(a, all), oracle::phi_of(a), 1e-12);
  const IndexList sel{1, 4, 7};
  const MatrixXd c = oracle::columns(a, sel);
  const MatrixXd gram = MatrixXd::Identity(3, 3) + c.transpose() * c;
  EXPECT_NEAR(evaluate_design(a, sel), oracle::logdet_spd(gram), 1e-12);
  EXPECT_THROW(evaluate_design(a, {9}), DimensionError);
}

TEST(GksLowerBound, LimitsAndDominance) {
  const VectorXd sigma = (VectorXd(3) << 4, 2, 0.5).finished();
  EXPECT_NEAR(gks_lower_bound(sigma, 1.0), phi_d(sigma), 1e-15);
  EXPECT_EQ(gks_lower_bound(sigma, kInf), 0.0);
  EXPECT_THROW(gks_lower_bound(sigma, 0.5), DomainError);
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const MatrixXd a = oracle::random_matrix(7, 10, 60 + seed);
    const auto svd = dense_svd(a, 4);
    const IndexList sel = oracle::subsets(10, 4)[seed * 7 % 210];
    const MatrixXd v11 = oracle::columns(MatrixXd(svd.v.transpose()), sel);
    EXPECT_LE(gks_lower_bound(svd.sigma, inv_norm_oracle(v11)), evaluate_design(a, sel) + 1e-10);
  }
}

TEST(CombinedLowerBound, IdentityAndDominance) {
  const VectorXd sigma = (VectorXd(3) << 3, 1, 0.2).finished();
  EXPECT_NEAR(combined_lower_bound(sigma, MatrixXd::Identity(3, 3)), phi_d(sigma), 1e-14);
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const MatrixXd v11 = oracle::random_matrix(5, 5, 200 + seed) * 0.3;
    const VectorXd s = (VectorXd(5) << 5, 4, 3, 2, 1).finished();
    const double whole = inv_norm_oracle(v11);
    if (whole < 1) continue;
    double expected = 0;
    for (Index j = 0; j < 5; ++j) {
      const double nu = std::min(inv_norm_oracle(v11.topLeftCorner(j + 1, j + 1)), whole);
      const double d = std::isinf(nu) ? 0.0 : s(j) / nu;
      expected += std::log(1 + d * d);
    }
    EXPECT_NEAR(combined_lower_bound(s, v11), expected, 1e-12);
    EXPECT_GE(combined_lower_bound(s, v11), gks_lower_bound(s, whole) - 1e-12);
  }
}

TEST(RafConstant, Values) {
  EXPECT_NEAR(raf_constant(4225, 50, 20, 0.1), 78.66470832058066, 1e-10);
  double previous = kInf;
  for (double delta : {0.01, 0.05, 0.1, 0.3, 0.6, 0.99}) {
    const double c = raf_constant(100, 30, 20, delta);
    EXPECT_LT(c, previous);
    previous = c;
    const double envelope = std::exp(1.0) * std::sqrt(30.0) * std::sqrt(100.0) / 21.0 * std::pow(2.0, 1.0 / 21.0);
    EXPECT_GE(c, envelope);
  }
  EXPECT_THROW(raf_constant(10, 5, 1, 0.1), DomainError);
  EXPECT_THROW(raf_constant(10, 5, 3, 1.0), DomainError);
}

TEST(HybridFactor, Values) {
  EXPECT_NEAR(hybrid_factor(40, 40, 40, 1.0, 1e-12), std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(hybrid_factor(100, 60, 20, 1.0, 0.5), 73.07530362578044, 1e-10);
  EXPECT_THROW(hybrid_factor(100, 10, 20, 1.0, 0.5), DomainError);
  EXPECT_THROW(hybrid_factor(100, 30, 20, 1.0, 1.0), DomainError);
}

TEST(HybridFactor, DecreasingInSWhenCouplingTermFixed) {
  // With f = 1 and k = s the q_f part is 1, so only sqrt(2m/(s(1-eps))) varies.
  double previous = kInf;
  for (Index s = 10; s <= 100; s += 10) {
    const double v = hybrid_factor(100, s, s, 1.0, 0.5);
    EXPECT_LT(v, previous);
    previous = v;
  }
}

TEST(BestSubset, MatchesSvdOracle) {
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    const MatrixXd a = oracle::random_matrix(5, 9, 300 + seed);
    const auto best = best_subset(a, 3);
    EXPECT_NEAR(best.phi, oracle::best_phi(a, 3), 1e-10);
    EXPECT_NEAR(evaluate_design(a, best.indices), best.phi, 1e-10);
  }
  EXPECT_THROW(best_subset(oracle::random_matrix(3, 60, 1), 20), DimensionError);
}

TEST(BoundReport, ChainHoldsForDeterministicSelections) {
  for (std::uint32_t seed = 0; seed < 15; ++seed) {
    const MatrixXd a = oracle::random_matrix(8, 10, 400 + seed);
    for (Index k = 2; k <= 5; ++k) {
      const auto exact = dense_svd(a, k);
      const double opt = oracle::best_phi(a, k);
      for (const auto& idx : {gks_select_from_basis(exact.v, exact.sigma, k).indices,
                              gks_select_from_basis(exact.v, exact.sigma, k, PivotMethod::srrqr(2.0)).indices,
                              greedy_select(a, k).indices}) {
        BoundOptions opts;
        opts.phi_opt = opt;
        const auto r = make_bound_report(a, exact, idx, opts);
        EXPECT_TRUE(r.holds()) << "seed " << seed << " k " << k;
        EXPECT_LE(r.phi_lower_gks, *r.phi_lower_combined + 1e-8);
      }
    }
  }
}

TEST(BoundReport, OptionalConstants) {
  const MatrixXd a = oracle::random_matrix(30, 40, 7);
  const auto exact = dense_svd(a, 5);
  BoundOptions opts;
  opts.raf_delta = 0.1;
  opts.raf_p = 10;
  opts.hybrid_s = 12;
  opts.f = 2.0;
  const auto r = make_bound_report(a, exact, {0, 1, 2, 3, 4}, opts);
  EXPECT_NEAR(*r.c_g, raf_constant(30, 15, 10, 0.1), 1e-12);
  EXPECT_NEAR(*r.q_f_u, hybrid_factor(40, 12, 5, 2.0, 0.5), 1e-12);
  EXPECT_NEAR(r.q_f, std::sqrt(1 + 4.0 * 5 * 35), 1e-12);
  EXPECT_FALSE(r.phi_opt.has_value());
  EXPECT_LE(r.phi_sigma_k, r.phi_full + 1e-12);
}

TEST(Criteria, FloatInstantiation) {
  const Eigen::MatrixXf a = oracle::random_matrix(5, 6, 3).cast<float>();
  EXPECT_NEAR(evaluate_design(a, {0, 2}), static_cast<float>(oracle::phi_of(oracle::columns(a.cast<double>(), {0, 2}))), 1e-4f);
  const Eigen::VectorXf s = Eigen::VectorXf::Ones(2);
  EXPECT_NEAR(gks_lower_bound(s, 1.0f), 2 * std::log(2.0f), 1e-6f);
}
