#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cac/chain_analytic.hpp"
#include "cac/traffic_model.hpp"

namespace cac {

inline constexpr double kDefaultCallDurationS = 120.0;
inline constexpr double kDefaultDwellTimeS = 240.0;

enum class SweepAxis { New, Handover, BothFixedRatio };

struct SweepSpec {
  SweepAxis vary = SweepAxis::BothFixedRatio;
  std::vector<double> values;
  double handover_ratio = 0.5;   // lambda_h / lambda_n for BothFixedRatio
  double lambda_new = 0.0;       // held fixed when vary == Handover
  double lambda_handover = 0.0;  // held fixed when vary == New
};

struct SimSettings {
  double horizon_s = 1e5;
  std::optional<double> warmup_s;  // default: 10% of horizon
  int replications = 20;
  std::uint64_t seed = 1;

  double warmup() const;
};

/// One experiment: a traffic mix in a cell, the schemes to compare and the
/// arrival-rate grid to sweep.
struct Scenario {
  std::string name;
  TrafficMix mix;
  double capacity = 0.0;
  double mean_call_duration_s = kDefaultCallDurationS;
  double mean_dwell_time_s = kDefaultDwellTimeS;
  std::vector<SchemePolicy> policies;
  SweepSpec sweep;
  std::optional<SimSettings> sim;
  std::optional<std::string> output_dir;

  /// (lambda_new, lambda_handover) at one sweep value.
  std::pair<double, double> rates_at(double value) const;
  CellParameters cell_at(double value) const;
};

/// Malformed JSON or a field of the wrong shape. The message carries the
/// line/column or the field path.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates a scenario document. Class ratios are normalized.
/// Throws ScenarioError on malformed input, ValidationError when the mix,
/// cell or sweep violates an invariant.
Scenario parse_scenario(std::string_view json_text, const std::string& source = "<memory>");
Scenario load_scenario(const std::filesystem::path& path);

const char* to_string(SweepAxis axis);

}  // namespace cac
