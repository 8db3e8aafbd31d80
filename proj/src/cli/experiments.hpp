#pragma once

#include "cli/config.hpp"
#include "cli/problem.hpp"
#include "cli/records.hpp"

#include <oedcs/selection.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace oedcs::cli {

struct RunOutput {
  std::vector<RunRecord> records;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

/// One selection with its wall time. Hybrid runs that hit a ResampleError are
/// retried with substreams of `seed` (at most 20 attempts).
struct MethodRun {
  SelectionResult<double> selection;
  double wall_ms = 0;
};
MethodRun run_method(const Problem& problem, const ExperimentConfig& cfg, const std::string& method, Index k,
                     std::uint64_t seed);

/// Fills phi_d, rel_error, v11_inv_norm, apply counts, phi_full and phi_opt.
RunRecord base_record(const Problem& problem, const ExperimentConfig& cfg, const std::string& method, Index k,
                      std::uint64_t seed, const MethodRun& run);

RunOutput run_select(const ExperimentConfig& cfg);
RunOutput run_select(const ExperimentConfig& cfg, const Problem& problem);
RunOutput run_sweep_k(const ExperimentConfig& cfg);
RunOutput run_sweep_k(const ExperimentConfig& cfg, const Problem& problem);
RunOutput run_compare_random(const ExperimentConfig& cfg);
RunOutput run_compare_random(const ExperimentConfig& cfg, const Problem& problem);
RunOutput run_complete(const ExperimentConfig& cfg);
RunOutput run_complete(const ExperimentConfig& cfg, const Problem& problem);
RunOutput run_bounds(const ExperimentConfig& cfg);
RunOutput run_bounds(const ExperimentConfig& cfg, const Problem& problem);

}  // namespace oedcs::cli
