#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cac {

/// One service class of the cell.
///
/// A class is real-time exactly when it cannot give up any bandwidth to admit
/// a handover (gamma_handover == 0). The per-call floor used when admitting a
/// new call is (1 - gamma_new) * bandwidth_req, and (1 - gamma_handover) *
/// bandwidth_req when admitting a handover.
struct TrafficClass {
  std::string name;
  double weight = 0.0;          // a_m, fraction of arrivals
  double bandwidth_req = 0.0;   // kbit/s
  double gamma_new = 0.0;       // max degradation to accept a new call
  double gamma_handover = 0.0;  // max degradation to accept a handover

  bool is_real_time() const { return gamma_handover == 0.0; }
  double min_bandwidth_new() const { return (1.0 - gamma_new) * bandwidth_req; }
  double min_bandwidth_handover() const { return (1.0 - gamma_handover) * bandwidth_req; }
};

struct TrafficMix {
  std::vector<TrafficClass> classes;

  std::size_t size() const { return classes.size(); }
  const TrafficClass& operator[](std::size_t m) const { return classes[m]; }

  /// Builds a mix from unnormalized ratios (a_1 : a_2 : ... : a_M) stored in
  /// each class's weight. Throws ValidationError when the ratios sum to zero
  /// or any ratio is negative.
  static TrafficMix from_ratios(std::vector<TrafficClass> classes);
};

struct CellParameters {
  double capacity = 0.0;         // C, kbit/s
  double lambda_new = 0.0;       // calls/s
  double lambda_handover = 0.0;  // calls/s
  double completion_rate = 0.0;  // mu, 1/s, at full requested bandwidth
  double dwell_rate = 0.0;       // eta, 1/s

  /// Channel release rate of an undegraded call (eta + mu).
  double base_release_rate() const { return completion_rate + dwell_rate; }
  double total_arrival_rate() const { return lambda_new + lambda_handover; }

  static CellParameters from_durations(double capacity, double lambda_new,
                                       double lambda_handover,
                                       double mean_call_duration_s,
                                       double mean_dwell_time_s);
};

struct MixAggregates {
  double mean_demand = 0.0;          // sum a_m beta_m
  double degradable_handover = 0.0;  // sum a_m gamma_mh beta_m
  double degradable_new = 0.0;       // sum a_m gamma_mn beta_m
  double mean_gamma_handover = 0.0;  // sum a_m gamma_mh
};

struct Violation {
  std::optional<std::size_t> class_index;  // 0-based; empty for mix/cell-level rules
  std::string rule;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Tolerance on sum of weights.
inline constexpr double kWeightSumTolerance = 1e-9;

ValidationReport validate(const TrafficMix& mix);
ValidationReport validate(const TrafficMix& mix, const CellParameters& cell);

/// Weighted demand and degradability sums. Throws ValidationError on an
/// invalid mix.
MixAggregates aggregates(const TrafficMix& mix);

}  // namespace cac
