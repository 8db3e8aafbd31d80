#include "cli/problem.hpp"

#include <oedcs/linalg.hpp>
#include <oedcs/random.hpp>

#include <cmath>

namespace oedcs::cli {

SvdFactors<double> Problem::factors(Index k) const {
  SvdFactors<double> out;
  out.u = exact.u.leftCols(k);
  out.sigma = exact.sigma.head(k);
  out.v = exact.v.leftCols(k);
  out.residual_sigma = VectorXd(exact.sigma.tail(exact.sigma.size() - k));
  return out;
}

double Problem::phi_full() const { return phi_d(exact.sigma); }

VectorXd Problem::map_from_rows(const IndexList& rows) const {
  const PosteriorSolver<double> solver(ft, precision, model.mu_pr, model.eta, rows);
  return solver.solve(rows.empty() ? data : select_entries(data, rows));
}

PosteriorSolver<double> Problem::full_solver() const {
  return PosteriorSolver<double>(ft, precision, model.mu_pr, model.eta);
}

namespace {

MatrixXd dense_of(const std::function<VectorXd(const VectorXd&)>& map, Index n) {
  MatrixXd out(n, n);
  VectorXd e = VectorXd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    out.col(j) = map(e);
    e(j) = 0.0;
  }
  return out;
}

void finish(Problem& p) {
  p.a = compose_preconditioned(p.model.forward, p.model.prior_factor, p.model.eta);
  p.a_dense = densify(p.a.op);
  p.exact = dense_svd(p.a_dense, std::min(p.a_dense.rows(), p.a_dense.cols()));
  p.ft = densify(p.model.forward.adjoint());
  p.precision = dense_of(p.model.prior_precision, p.model.parameter_dim());
  p.model.forward.reset_counts();
  p.model.prior_factor.reset_counts();
  p.a.op.reset_counts();
}

}  // namespace

Problem build_problem(const ExperimentConfig& cfg) {
  const ProblemConfig& pc = cfg.problem;
  Problem p;
  if (pc.kind == "synthetic") {
    VectorXd spectrum = Eigen::Map<const VectorXd>(pc.spectrum.data(), static_cast<Index>(pc.spectrum.size()));
    const SyntheticModel syn = build_synthetic(pc.n, pc.m, spectrum, pc.instance_seed);
    p.id = "synthetic";
    p.model.forward = make_dense_operator(MatrixXd(syn.matrix.transpose()));
    p.model.prior_factor = make_identity_operator<double>(pc.n);
    p.model.prior_precision = [](const VectorXd& x) -> VectorXd { return x; };
    p.model.mu_pr = VectorXd::Zero(pc.n);
    p.model.eta = 1.0;
    p.truth = gaussian_vector<double>(pc.n, substream_seed(cfg.noise_seed, 0));
    p.clean = p.model.forward.apply(p.truth);
    // eta = 1 always enters the posterior; noise_pct = 0 only switches the noise draw off.
    p.data = p.clean;
    if (cfg.noise_pct > 0) p.data += gaussian_vector<double>(pc.m, substream_seed(cfg.noise_seed, 1));
    finish(p);
    return p;
  }

  if (!(cfg.noise_pct > 0)) throw ConfigError("noise_pct", 0, "heat and tomo problems need noise_pct > 0");
  const Grid2D grid(pc.n_side);
  const Prior prior = build_prior(grid, pc.kappa2, pc.alpha);
  if (pc.kind == "heat") {
    p.id = "heat";
    p.model.forward = build_heat2d(grid, sensor_lattice(grid, pc.sensors_per_side), pc.final_time, pc.steps);
    p.truth = grid.sample(franke);
  } else {
    p.id = "tomo";
    p.model.forward = build_tomo2d(grid, Point{pc.source_x, pc.source_y}, boundary_receivers(pc.receivers),
                                   pc.zone_width);
    p.truth = grid.sample(phantom);
  }
  p.model.prior_factor = prior.factor;
  p.model.prior_precision = prior.precision;
  p.model.mu_pr = VectorXd::Zero(grid.size());
  const SyntheticData d = generate_data(p.model.forward, p.truth, cfg.noise_pct, cfg.noise_seed);
  p.clean = d.clean;
  p.data = d.data;
  p.model.eta = d.eta;
  finish(p);
  return p;
}

}  // namespace oedcs::cli
