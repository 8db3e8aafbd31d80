#include "cli/records.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace oedcs::cli {

const std::vector<std::string>& record_fields() {
  static const std::vector<std::string> fields{
      "problem",         "method",         "k",
      "seed",            "phi_d",          "phi_opt",
      "rel_error",       "v11_inv_norm",   "forward_applies",
      "adjoint_applies", "wall_ms",        "phi_full",
      "phi_sigma_k",     "phi_lower_gks",  "phi_lower_combined",
      "q_f",             "c_g",            "q_f_u",
      "bounds_hold",     "completion_rel_error", "approx_map_rel_error",
      "completion_bound_measured", "completion_bound_qf"};
  return fields;
}

namespace {

template <typename T>
FieldValue opt(const std::optional<T>& v) {
  if (!v) return std::monostate{};
  return FieldValue(*v);
}

}  // namespace

std::vector<FieldValue> record_values(const RunRecord& r) {
  return {r.problem,
          r.method,
          static_cast<std::int64_t>(r.k),
          r.seed,
          opt(r.phi_d),
          opt(r.phi_opt),
          opt(r.rel_error),
          opt(r.v11_inv_norm),
          opt(r.forward_applies),
          opt(r.adjoint_applies),
          opt(r.wall_ms),
          opt(r.phi_full),
          opt(r.phi_sigma_k),
          opt(r.phi_lower_gks),
          opt(r.phi_lower_combined),
          opt(r.q_f),
          opt(r.c_g),
          opt(r.q_f_u),
          opt(r.bounds_hold),
          opt(r.completion_rel_error),
          opt(r.approx_map_rel_error),
          opt(r.completion_bound_measured),
          opt(r.completion_bound_qf)};
}

std::string format_csv_value(const FieldValue& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(std::uint64_t u) const { return std::to_string(u); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(double d) const {
      if (std::isnan(d)) return "nan";
      if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      return buf;
    }
  };
  return std::visit(Visitor{}, v);
}

std::string to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  const auto& fields = record_fields();
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
  out << '\n';
  for (const auto& r : records) {
    const auto values = record_values(r);
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_csv_value(values[i]);
    out << '\n';
  }
  return out.str();
}

nlohmann::ordered_json to_json(const std::vector<RunRecord>& records, const nlohmann::ordered_json& summary) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  const auto& fields = record_fields();
  for (const auto& r : records) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    const auto values = record_values(r);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              row[fields[i]] = nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(x)) {
                row[fields[i]] = x;
              } else {
                row[fields[i]] = format_csv_value(x);
              }
            } else {
              row[fields[i]] = x;
            }
          },
          values[i]);
    }
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["fields"] = fields;
  doc["records"] = std::move(rows);
  doc["summary"] = summary;
  return doc;
}

}  // namespace oedcs::cli
