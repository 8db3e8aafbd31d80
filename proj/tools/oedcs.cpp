#include "cli/config.hpp"
#include "cli/experiments.hpp"
#include "cli/records.hpp"

#include <oedcs/errors.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using oedcs::cli::ExperimentConfig;
using oedcs::cli::RunOutput;

struct Overrides {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
};

int run(const std::string& name, const Overrides& o,
        const std::function<RunOutput(const ExperimentConfig&)>& fn) {
  ExperimentConfig cfg = o.config.empty() ? oedcs::cli::parse_config("{}") : oedcs::cli::load_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (!o.format.empty()) cfg.format = o.format;
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();

  const RunOutput out = fn(cfg);
  const std::string body = cfg.format == "json" ? oedcs::cli::to_json(out.records, out.summary).dump(2) + "\n"
                                                : oedcs::cli::to_csv(out.records);
  if (cfg.out_dir.empty()) {
    std::cout << body;
  } else {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / (name + "." + cfg.format);
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << body;
    std::cerr << "wrote " << out.records.size() << " records to " << path.string() << "\n";
  }
  std::cerr << out.summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor placement by column subset selection for linear Bayesian inverse problems"};
  app.require_subcommand(1);
  Overrides o;
  const std::map<std::string, std::function<RunOutput(const ExperimentConfig&)>> commands{
      {"select", [](const ExperimentConfig& c) { return oedcs::cli::run_select(c); }},
      {"sweep-k", [](const ExperimentConfig& c) { return oedcs::cli::run_sweep_k(c); }},
      {"compare-random", [](const ExperimentConfig& c) { return oedcs::cli::run_compare_random(c); }},
      {"complete", [](const ExperimentConfig& c) { return oedcs::cli::run_complete(c); }},
      {"bounds", [](const ExperimentConfig& c) { return oedcs::cli::run_bounds(c); }},
  };
  const std::map<std::string, std::string> help{
      {"select", "Select sensors with each configured method"},
      {"sweep-k", "Select over a range of k and report trends"},
      {"compare-random", "Compare methods against random designs"},
      {"complete", "Complete the data from the selected sensors and solve for the MAP point"},
      {"bounds", "Evaluate the design criterion bounds for each selection"},
  };
  std::uint64_t seed = 0;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", o.config, "YAML experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory (stdout when omitted)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "Base seed, overrides the configuration");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) o.seed = seed;
    try {
      return run(sub->get_name(), o, commands.at(sub->get_name()));
    } catch (const oedcs::cli::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const oedcs::NumericalError& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 3;
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::domain_error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
