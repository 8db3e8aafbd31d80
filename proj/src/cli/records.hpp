#pragma once

#include <oedcs/types.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace oedcs::cli {

/// One row of experiment output. Missing values serialize as empty CSV cells
/// and JSON null.
struct RunRecord {
  std::string problem;
  std::string method;
  Index k = 0;
  std::uint64_t seed = 0;
  std::optional<double> phi_d;
  std::optional<double> phi_opt;
  std::optional<double> rel_error;
  std::optional<double> v11_inv_norm;
  std::optional<std::uint64_t> forward_applies;
  std::optional<std::uint64_t> adjoint_applies;
  std::optional<double> wall_ms;
  std::optional<double> phi_full;
  std::optional<double> phi_sigma_k;
  std::optional<double> phi_lower_gks;
  std::optional<double> phi_lower_combined;
  std::optional<double> q_f;
  std::optional<double> c_g;
  std::optional<double> q_f_u;
  std::optional<bool> bounds_hold;
  std::optional<double> completion_rel_error;
  std::optional<double> approx_map_rel_error;
  std::optional<double> completion_bound_measured;
  std::optional<double> completion_bound_qf;
};

using FieldValue = std::variant<std::monostate, std::string, std::int64_t, std::uint64_t, double, bool>;

/// Column names in output order.
const std::vector<std::string>& record_fields();

/// Values in record_fields() order.
std::vector<FieldValue> record_values(const RunRecord& r);

std::string format_csv_value(const FieldValue& v);

std::string to_csv(const std::vector<RunRecord>& records);

nlohmann::ordered_json to_json(const std::vector<RunRecord>& records, const nlohmann::ordered_json& summary);

}  // namespace oedcs::cli
