#include "cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace oedcs::cli {

ConfigError::ConfigError(const std::string& field, int line, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? std::string() : field + ": ") + what),
      field_(field),
      line_(line) {}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

template <typename T>
T read(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, line_of(node), "cannot read value '" + YAML::Dump(node) + "'");
  }
}

void check_keys(const YAML::Node& map, const std::string& section, const std::set<std::string>& allowed) {
  if (!map.IsMap()) throw ConfigError(section, line_of(map), "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError(section.empty() ? key : section + "." + key, line_of(kv.first), "unknown key");
    }
  }
}

void read_problem(const YAML::Node& node, ProblemConfig& p) {
  check_keys(node, "problem",
             {"kind", "n_side", "final_time", "steps", "sensors_per_side", "receivers", "zone_width",
              "source", "kappa2", "alpha", "n", "m", "spectrum", "seed"});
  if (node["kind"]) p.kind = read<std::string>(node["kind"], "problem.kind");
  if (node["n_side"]) p.n_side = read<Index>(node["n_side"], "problem.n_side");
  if (node["final_time"]) p.final_time = read<double>(node["final_time"], "problem.final_time");
  if (node["steps"]) p.steps = read<Index>(node["steps"], "problem.steps");
  if (node["sensors_per_side"]) p.sensors_per_side = read<Index>(node["sensors_per_side"], "problem.sensors_per_side");
  if (node["receivers"]) p.receivers = read<Index>(node["receivers"], "problem.receivers");
  if (node["zone_width"]) p.zone_width = read<double>(node["zone_width"], "problem.zone_width");
  if (node["source"]) {
    const auto xy = read<std::vector<double>>(node["source"], "problem.source");
    if (xy.size() != 2) throw ConfigError("problem.source", line_of(node["source"]), "expected [x, y]");
    p.source_x = xy[0];
    p.source_y = xy[1];
  }
  if (node["kappa2"]) p.kappa2 = read<double>(node["kappa2"], "problem.kappa2");
  if (node["alpha"]) p.alpha = read<double>(node["alpha"], "problem.alpha");
  if (node["n"]) p.n = read<Index>(node["n"], "problem.n");
  if (node["m"]) p.m = read<Index>(node["m"], "problem.m");
  if (node["spectrum"]) p.spectrum = read<std::vector<double>>(node["spectrum"], "problem.spectrum");
  if (node["seed"]) p.instance_seed = read<std::uint64_t>(node["seed"], "problem.seed");
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::set<std::string> kinds{"heat", "tomo", "synthetic"};
  static const std::set<std::string> known{"gks", "raf", "hybrid", "greedy", "random", "full"};
  if (!kinds.count(problem.kind)) throw ConfigError("problem.kind", 0, "must be heat, tomo or synthetic");
  if (problem.n_side < 3) throw ConfigError("problem.n_side", 0, "must be >= 3");
  if (!(problem.final_time > 0) || problem.steps < 1) throw ConfigError("problem.final_time", 0, "need T > 0 and steps >= 1");
  if (problem.sensors_per_side < 1) throw ConfigError("problem.sensors_per_side", 0, "must be >= 1");
  if (problem.receivers < 1) throw ConfigError("problem.receivers", 0, "must be >= 1");
  if (!(problem.zone_width >= 0)) throw ConfigError("problem.zone_width", 0, "must be >= 0");
  if (!(problem.kappa2 > 0) || !(problem.alpha > 0)) throw ConfigError("problem.kappa2", 0, "kappa2 and alpha must be positive");
  if (problem.kind == "synthetic") {
    if (problem.n < 1 || problem.m < 1) throw ConfigError("problem.n", 0, "n and m must be positive");
    if (problem.spectrum.empty()) throw ConfigError("problem.spectrum", 0, "required for synthetic problems");
  }
  if (methods.empty()) throw ConfigError("method", 0, "at least one method required");
  for (const auto& m : methods) {
    if (!known.count(m)) throw ConfigError("method", 0, "unknown method '" + m + "'");
  }
  if (ks.empty()) throw ConfigError("k", 0, "at least one k required");
  for (Index k : ks) {
    if (k < 1) throw ConfigError("k", 0, "must be >= 1");
  }
  if (seed_count < 1) throw ConfigError("seeds", 0, "must be >= 1");
  if (p < 0 || q < 0) throw ConfigError("svd", 0, "p and q must be >= 0");
  if (pivot != "qrcp" && pivot != "srrqr") throw ConfigError("pivot.rule", 0, "must be qrcp or srrqr");
  if (!(f >= 1)) throw ConfigError("pivot.f", 0, "must be >= 1");
  if (!(beta > 0 && beta <= 1)) throw ConfigError("hybrid.beta", 0, "must lie in (0, 1]");
  if (hybrid_s < 0) throw ConfigError("hybrid.s", 0, "must be >= 0");
  if (hybrid_f && !(*hybrid_f >= 1)) throw ConfigError("hybrid.f", 0, "must be >= 1");
  if (!(noise_pct >= 0)) throw ConfigError("noise_pct", 0, "must be >= 0");
  if (designs < 1) throw ConfigError("compare.designs", 0, "must be >= 1");
  if (exhaustive != "auto" && exhaustive != "on" && exhaustive != "off") {
    throw ConfigError("exhaustive", 0, "must be auto, on or off");
  }
  if (!(raf_delta > 0 && raf_delta < 1)) throw ConfigError("bounds.delta", 0, "must lie in (0, 1)");
  if (!(hybrid_eps > 0 && hybrid_eps < 1)) throw ConfigError("bounds.eps", 0, "must lie in (0, 1)");
  if (format != "csv" && format != "json") throw ConfigError("output.format", 0, "must be csv or json");
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  ExperimentConfig cfg;
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  check_keys(root, "",
             {"problem", "method", "k", "k_range", "seed", "seeds", "svd", "pivot", "hybrid", "noise_pct",
              "noise_seed", "compare", "exhaustive", "bounds", "output"});
  if (root["problem"]) read_problem(root["problem"], cfg.problem);
  if (const auto m = root["method"]) {
    cfg.methods = m.IsSequence() ? read<std::vector<std::string>>(m, "method")
                                 : std::vector<std::string>{read<std::string>(m, "method")};
  }
  if (root["k"] && root["k_range"]) throw ConfigError("k_range", line_of(root["k_range"]), "give either k or k_range");
  if (const auto k = root["k"]) {
    cfg.ks = k.IsSequence() ? read<std::vector<Index>>(k, "k") : std::vector<Index>{read<Index>(k, "k")};
  }
  if (const auto r = root["k_range"]) {
    const auto v = read<std::vector<Index>>(r, "k_range");
    if (v.size() < 2 || v.size() > 3 || v[0] > v[1] || (v.size() == 3 && v[2] < 1)) {
      throw ConfigError("k_range", line_of(r), "expected [first, last] or [first, last, step]");
    }
    cfg.ks.clear();
    for (Index k = v[0]; k <= v[1]; k += (v.size() == 3 ? v[2] : 1)) cfg.ks.push_back(k);
  }
  if (root["seed"]) cfg.seed = read<std::uint64_t>(root["seed"], "seed");
  if (root["seeds"]) cfg.seed_count = read<Index>(root["seeds"], "seeds");
  if (const auto s = root["svd"]) {
    check_keys(s, "svd", {"p", "q"});
    if (s["p"]) cfg.p = read<Index>(s["p"], "svd.p");
    if (s["q"]) cfg.q = read<Index>(s["q"], "svd.q");
  }
  if (const auto s = root["pivot"]) {
    check_keys(s, "pivot", {"rule", "f"});
    if (s["rule"]) cfg.pivot = read<std::string>(s["rule"], "pivot.rule");
    if (s["f"]) cfg.f = read<double>(s["f"], "pivot.f");
  }
  if (const auto s = root["hybrid"]) {
    check_keys(s, "hybrid", {"s", "beta", "f"});
    if (s["s"]) cfg.hybrid_s = read<Index>(s["s"], "hybrid.s");
    if (s["beta"]) cfg.beta = read<double>(s["beta"], "hybrid.beta");
    if (s["f"]) cfg.hybrid_f = read<double>(s["f"], "hybrid.f");
  }
  if (root["noise_pct"]) cfg.noise_pct = read<double>(root["noise_pct"], "noise_pct");
  if (root["noise_seed"]) cfg.noise_seed = read<std::uint64_t>(root["noise_seed"], "noise_seed");
  if (const auto s = root["compare"]) {
    check_keys(s, "compare", {"designs"});
    if (s["designs"]) cfg.designs = read<Index>(s["designs"], "compare.designs");
  }
  if (root["exhaustive"]) cfg.exhaustive = read<std::string>(root["exhaustive"], "exhaustive");
  if (const auto s = root["bounds"]) {
    check_keys(s, "bounds", {"delta", "eps"});
    if (s["delta"]) cfg.raf_delta = read<double>(s["delta"], "bounds.delta");
    if (s["eps"]) cfg.hybrid_eps = read<double>(s["eps"], "bounds.eps");
  }
  if (const auto s = root["output"]) {
    check_keys(s, "output", {"dir", "format"});
    if (s["dir"]) cfg.out_dir = read<std::string>(s["dir"], "output.dir");
    if (s["format"]) cfg.format = read<std::string>(s["format"], "output.format");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace oedcs::cli
