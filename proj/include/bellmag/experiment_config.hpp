#ifndef BELLMAG_EXPERIMENT_CONFIG_HPP
#define BELLMAG_EXPERIMENT_CONFIG_HPP

// JSON schema for experiment configs.  Rate fields take unit-suffixed
// strings ("1 GHz", "73 kHz") or plain numbers; the per-file `angular` flag
// says whether rates are already angular (rad/s).  With angular = false
// (the default) rates are read as ordinary frequencies and multiplied by
// 2*pi.  Durations take "31 ns" style strings or plain seconds;
// temperature takes "10 mK" or plain kelvin.

#include <string>
#include <vector>

#include <json.hpp>

#include "bellmag/feasibility.hpp"

namespace bellmag::feasibility {

/// Parse a config object.  Returns the parsed params; schema problems are
/// appended to `errors` (one message per offending key).
ExperimentParams params_from_json(const nlohmann::json& config,
                                  std::vector<std::string>& errors);

/// Machine-readable report block.
nlohmann::json report_to_json(const FeasibilityReport& report);

/// Human-readable report text.
std::string format_report(const FeasibilityReport& report);

}  // namespace bellmag::feasibility

#endif  // BELLMAG_EXPERIMENT_CONFIG_HPP
