#pragma once
// Config ingestion and machine-readable reporting. One config object = one
// experiment; a top-level array batches several. The schema is strict:
// unknown keys are rejected. Complex numbers are accepted as plain numbers,
// {"re","im"} pairs, or {"mod_log","arg"}; outputs prefer the polar-log form
// (exact zero is emitted as {"re":0,"im":0}).

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "sunidyn/constructors.hpp"
#include "sunidyn/oracle.hpp"

namespace sunidyn {

inline constexpr const char* kArtifactName = "sunidyn";
inline constexpr const char* kArtifactVersion = "0.1.0";

nlohmann::json complex_to_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);

nlohmann::json element_to_json(const Element& e);
Element element_from_json(const nlohmann::json& j, int degree_cap = Polynomial::kDefaultDegreeCap);

nlohmann::json operator_to_json(const OperatorSpec& op);
OperatorSpec operator_from_json(const nlohmann::json& j);

Metric metric_from_json(const nlohmann::json& j);

struct RunResult {
  nlohmann::json report;
  int exit_code = 0;  // 0 ok, 3 budget/search exhaustion with partial results
};

// Executes one experiment object or a batch array. Usage and capacity
// problems (including schema violations) surface as exceptions; the CLI maps
// them to exit code 2 with no report. The "results" section of the report is
// byte-deterministic for a fixed config and seed.
RunResult run_config(const nlohmann::json& config,
                     std::optional<std::uint64_t> seed_override = std::nullopt);

// Parses `text` first; malformed JSON raises UsageError.
RunResult run_config_text(const std::string& text,
                          std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace sunidyn
