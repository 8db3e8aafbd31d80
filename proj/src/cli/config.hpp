#pragma once

#include <oedcs/types.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oedcs::cli {

/// Invalid or unreadable configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, int line, const std::string& what);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ProblemConfig {
  std::string kind = "heat";  // heat | tomo | synthetic
  Index n_side = 33;
  // heat
  double final_time = 0.01;
  Index steps = 100;
  Index sensors_per_side = 10;
  // tomo
  Index receivers = 256;
  double zone_width = 0.05 * 1.4142135623730951;
  double source_x = 1.0;
  double source_y = 0.5;
  // prior (heat, tomo)
  double kappa2 = 80.0;
  double alpha = 0.1;
  // synthetic
  Index n = 20;
  Index m = 8;
  std::vector<double> spectrum;
  std::uint64_t instance_seed = 0;
};

struct ExperimentConfig {
  ProblemConfig problem;
  std::vector<std::string> methods{"gks"};  // gks | raf | hybrid | greedy | random | full
  std::vector<Index> ks{10};
  std::uint64_t seed = 0;
  Index seed_count = 1;
  Index p = 20;
  Index q = 1;
  std::string pivot = "qrcp";  // qrcp | srrqr
  double f = 2.0;              // sRRQR factor when pivot = srrqr
  Index hybrid_s = 0;          // 0: min(ceil(k log k), m)
  double beta = 0.9;
  std::optional<double> hybrid_f;  // sRRQR factor for the hybrid second stage
  double noise_pct = 0.02;
  std::uint64_t noise_seed = 0;
  Index designs = 100;
  std::string exhaustive = "auto";  // auto | on | off
  double raf_delta = 0.1;
  double hybrid_eps = 0.5;
  std::string out_dir;
  std::string format = "csv";

  void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

}  // namespace oedcs::cli
