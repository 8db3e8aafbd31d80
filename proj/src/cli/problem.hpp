#pragma once

#include "cli/config.hpp"

#include <oedcs/completion.hpp>
#include <oedcs/linear_operator.hpp>
#include <oedcs/models.hpp>
#include <oedcs/rsvd.hpp>

#include <string>

namespace oedcs::cli {

/// A fully assembled desk-scale instance: model, data, the preconditioned
/// operator A (n x m) and its exact dense SVD.
struct Problem {
  std::string id;
  BayesModel<double> model;
  PreconditionedOperator<double> a;
  MatrixXd a_dense;
  SvdFactors<double> exact;  // thin SVD with all min(n, m) factors
  MatrixXd ft;               // F^T, n x m
  MatrixXd precision;        // Gamma_pr^{-1}, n x n
  VectorXd truth;
  VectorXd clean;
  VectorXd data;

  Index n() const { return a_dense.rows(); }
  Index m() const { return a_dense.cols(); }

  /// Leading k exact factors; residual_sigma holds the rest of the spectrum.
  SvdFactors<double> factors(Index k) const;
  double phi_full() const;

  /// MAP point from the data at `rows` (all sensors when empty).
  VectorXd map_from_rows(const IndexList& rows) const;
  PosteriorSolver<double> full_solver() const;
};

/// Synthetic instances use F = A^T, G = I, eta = 1 and a standard normal truth
/// and noise (no noise when noise_pct = 0); heat and tomo use the configured
/// grid, prior and noise level.
Problem build_problem(const ExperimentConfig& cfg);

}  // namespace oedcs::cli
