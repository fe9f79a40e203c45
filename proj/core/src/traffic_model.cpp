#include "cac/traffic_model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace cac {

namespace {

std::string label(const TrafficClass& c, std::size_t m) {
  std::ostringstream os;
  os << "class " << (m + 1);
  if (!c.name.empty()) os << " (" << c.name << ")";
  return os.str();
}

void check_classes(const TrafficMix& mix, ValidationReport& report) {
  auto add = [&](std::size_t m, std::string rule, std::string msg) {
    report.violations.push_back({m, std::move(rule), label(mix.classes[m], m) + ": " + msg});
  };
  for (std::size_t m = 0; m < mix.size(); ++m) {
    const auto& c = mix.classes[m];
    if (!(c.bandwidth_req > 0.0) || !std::isfinite(c.bandwidth_req))
      add(m, "bandwidth_positive", "requested bandwidth must be > 0");
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
      add(m, "weight_nonnegative", "weight must be >= 0");
    if (!(c.gamma_new >= 0.0))
      add(m, "gamma_range", "gamma_new must be >= 0");
    if (!(c.gamma_handover < 1.0))
      add(m, "gamma_range", "gamma_handover must be < 1");
    if (!(c.gamma_new <= c.gamma_handover))
      add(m, "gamma_ordering",
          "gamma_new must not exceed gamma_handover (beta_h <= beta_n <= beta_r)");
  }
}

}  // namespace

TrafficMix TrafficMix::from_ratios(std::vector<TrafficClass> classes) {
  ValidationReport report;
  double total = 0.0;
  for (std::size_t m = 0; m < classes.size(); ++m) {
    if (!(classes[m].weight >= 0.0) || !std::isfinite(classes[m].weight)) {
      report.violations.push_back(
          {m, "weight_nonnegative", label(classes[m], m) + ": ratio must be finite and >= 0"});
    } else {
      total += classes[m].weight;
    }
  }
  if (classes.empty())
    report.violations.push_back({std::nullopt, "mix_nonempty", "mix must contain at least one class"});
  else if (!(total > 0.0))
    report.violations.push_back(
        {std::nullopt, "weight_normalization", "class ratios sum to zero; cannot normalize"});
  if (!report.ok()) throw ValidationError(std::move(report));

  for (auto& c : classes) c.weight /= total;
  return TrafficMix{std::move(classes)};
}

CellParameters CellParameters::from_durations(double capacity, double lambda_new,
                                              double lambda_handover,
                                              double mean_call_duration_s,
                                              double mean_dwell_time_s) {
  if (!(mean_call_duration_s > 0.0) || !(mean_dwell_time_s > 0.0))
    throw std::invalid_argument("mean call duration and dwell time must be > 0");
  CellParameters cell;
  cell.capacity = capacity;
  cell.lambda_new = lambda_new;
  cell.lambda_handover = lambda_handover;
  cell.completion_rate = 1.0 / mean_call_duration_s;
  // An infinite dwell time means calls never hand over out of the cell.
  cell.dwell_rate = std::isinf(mean_dwell_time_s) ? 0.0 : 1.0 / mean_dwell_time_s;
  return cell;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << "  - [" << v.rule << "] " << v.message << '\n';
  return os.str();
}

ValidationError::ValidationError(ValidationReport report)
    : std::invalid_argument("validation failed:\n" + report.to_string()),
      report_(std::move(report)) {}

ValidationReport validate(const TrafficMix& mix) {
  ValidationReport report;
  if (mix.classes.empty()) {
    report.violations.push_back({std::nullopt, "mix_nonempty", "mix must contain at least one class"});
    return report;
  }
  check_classes(mix, report);
  double total = 0.0;
  for (const auto& c : mix.classes) total += c.weight;
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os << "class weights sum to " << total << ", expected 1 (weights must be normalized)";
    report.violations.push_back({std::nullopt, "weight_normalization", os.str()});
  }
  return report;
}

ValidationReport validate(const TrafficMix& mix, const CellParameters& cell) {
  ValidationReport report = validate(mix);
  auto add = [&](std::string rule, std::string msg) {
    report.violations.push_back({std::nullopt, std::move(rule), std::move(msg)});
  };
  if (!(cell.capacity > 0.0) || !std::isfinite(cell.capacity)) add("capacity_positive", "capacity must be > 0");
  if (!(cell.lambda_new >= 0.0)) add("rate_nonnegative", "lambda_new must be >= 0");
  if (!(cell.lambda_handover >= 0.0)) add("rate_nonnegative", "lambda_handover must be >= 0");
  if (!(cell.completion_rate >= 0.0)) add("rate_nonnegative", "completion rate must be >= 0");
  if (!(cell.dwell_rate >= 0.0)) add("rate_nonnegative", "dwell rate must be >= 0");
  if (!(cell.completion_rate > 0.0 || cell.dwell_rate > 0.0))
    add("release_positive", "at least one of completion rate and dwell rate must be > 0");
  return report;
}

MixAggregates aggregates(const TrafficMix& mix) {
  if (auto report = validate(mix); !report.ok()) throw ValidationError(std::move(report));
  MixAggregates agg;
  for (const auto& c : mix.classes) {
    agg.mean_demand += c.weight * c.bandwidth_req;
    agg.degradable_handover += c.weight * c.gamma_handover * c.bandwidth_req;
    agg.degradable_new += c.weight * c.gamma_new * c.bandwidth_req;
    agg.mean_gamma_handover += c.weight * c.gamma_handover;
  }
  return agg;
}

}  // namespace cac
