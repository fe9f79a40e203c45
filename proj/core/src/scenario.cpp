#include "cac/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cac {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& source, const std::string& path, const std::string& what) {
  throw ScenarioError(source + ": field '" + path + "': " + what);
}

double get_number(const json& obj, const std::string& key, const std::string& path, const std::string& source) {
  const json& v = obj.at(key);
  if (!v.is_number()) field_error(source, path + key, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

std::optional<double> opt_number(const json& obj, const std::string& key, const std::string& path,
                                 const std::string& source) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get_number(obj, key, path, source);
}

double req_number(const json& obj, const std::string& key, const std::string& path, const std::string& source) {
  if (!obj.contains(key)) field_error(source, path + key, "missing required field");
  return get_number(obj, key, path, source);
}

const json& req_object(const json& obj, const std::string& key, const std::string& path, const std::string& source) {
  if (!obj.contains(key)) field_error(source, path + key, "missing required field");
  if (!obj.at(key).is_object()) field_error(source, path + key, "expected an object");
  return obj.at(key);
}

std::string position(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

SchemePolicy parse_policy(const json& p, const std::string& path, const std::string& source) {
  try {
    if (p.is_string()) return SchemePolicy::parse(p.get<std::string>());
    if (p.is_object()) {
      if (!p.contains("scheme") || !p.at("scheme").is_string()) field_error(source, path + ".scheme", "expected a string");
      const std::string scheme = p.at("scheme").get<std::string>();
      if (scheme == "guard") {
        return SchemePolicy::guard(req_number(p, "guard_fraction", path + ".", source));
      }
      return SchemePolicy::parse(scheme);
    }
  } catch (const std::invalid_argument& e) {
    field_error(source, path, e.what());
  }
  field_error(source, path, "expected a policy name or {\"scheme\": ...} object");
}

SweepAxis parse_axis(const std::string& v, const std::string& source) {
  if (v == "new") return SweepAxis::New;
  if (v == "handover") return SweepAxis::Handover;
  if (v == "both_fixed_ratio") return SweepAxis::BothFixedRatio;
  field_error(source, "sweep.vary", "expected \"new\", \"handover\" or \"both_fixed_ratio\", got \"" + v + "\"");
}

void check_scenario(const Scenario& sc) {
  ValidationReport report = validate(sc.mix, sc.cell_at(sc.sweep.values.empty() ? 0.0 : sc.sweep.values.front()));
  auto add = [&](std::string rule, std::string msg) {
    report.violations.push_back({std::nullopt, std::move(rule), std::move(msg)});
  };
  if (sc.policies.empty()) add("policies_nonempty", "at least one policy is required");
  if (sc.sweep.values.empty()) add("sweep_nonempty", "sweep.values must not be empty");
  for (double v : sc.sweep.values)
    if (!(v >= 0.0) || !std::isfinite(v)) add("rate_nonnegative", "sweep values must be finite and >= 0");
  if (!(sc.sweep.handover_ratio >= 0.0)) add("rate_nonnegative", "sweep.handover_ratio must be >= 0");
  if (!(sc.sweep.lambda_new >= 0.0) || !(sc.sweep.lambda_handover >= 0.0))
    add("rate_nonnegative", "fixed sweep rates must be >= 0");
  if (sc.sim) {
    if (sc.sim->replications < 1) add("replications_positive", "sim.replications must be >= 1");
    if (!(sc.sim->horizon_s > 0.0)) add("horizon_positive", "sim.horizon_s must be > 0");
    if (!(sc.sim->warmup() >= 0.0 && sc.sim->warmup() < sc.sim->horizon_s))
      add("warmup_range", "sim.warmup_s must satisfy 0 <= warmup < horizon");
  }
  if (!report.ok()) throw ValidationError(std::move(report));
}

}  // namespace

double SimSettings::warmup() const { return warmup_s.value_or(0.1 * horizon_s); }

std::pair<double, double> Scenario::rates_at(double value) const {
  switch (sweep.vary) {
    case SweepAxis::New: return {value, sweep.lambda_handover};
    case SweepAxis::Handover: return {sweep.lambda_new, value};
    case SweepAxis::BothFixedRatio: return {value, sweep.handover_ratio * value};
  }
  return {value, 0.0};
}

CellParameters Scenario::cell_at(double value) const {
  const auto [ln, lh] = rates_at(value);
  return CellParameters::from_durations(capacity, ln, lh, mean_call_duration_s, mean_dwell_time_s);
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::New: return "new";
    case SweepAxis::Handover: return "handover";
    case SweepAxis::BothFixedRatio: return "both_fixed_ratio";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError(source + ": JSON parse error at " + position(json_text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ScenarioError(source + ": top-level value must be an object");

  Scenario sc;
  try {
    sc.name = doc.value("name", std::string{});
    sc.capacity = req_number(doc, "capacity_kbps", "", source);
    sc.mean_call_duration_s = opt_number(doc, "mean_call_duration_s", "", source).value_or(kDefaultCallDurationS);
    sc.mean_dwell_time_s = opt_number(doc, "mean_dwell_time_s", "", source).value_or(kDefaultDwellTimeS);
    if (!(sc.mean_call_duration_s > 0.0)) field_error(source, "mean_call_duration_s", "must be > 0");
    if (!(sc.mean_dwell_time_s > 0.0)) field_error(source, "mean_dwell_time_s", "must be > 0");

    if (!doc.contains("classes") || !doc.at("classes").is_array())
      field_error(source, "classes", "missing or not an array");
    std::vector<TrafficClass> classes;
    const json& arr = doc.at("classes");
    for (std::size_t m = 0; m < arr.size(); ++m) {
      const std::string path = "classes[" + std::to_string(m) + "].";
      const json& c = arr[m];
      if (!c.is_object()) field_error(source, path.substr(0, path.size() - 1), "expected an object");
      TrafficClass tc;
      tc.name = c.value("name", std::string{});
      tc.weight = opt_number(c, "ratio", path, source).value_or(1.0);
      tc.bandwidth_req = req_number(c, "bandwidth_kbps", path, source);
      tc.gamma_new = opt_number(c, "gamma_new", path, source).value_or(0.0);
      tc.gamma_handover = opt_number(c, "gamma_handover", path, source).value_or(0.0);
      classes.push_back(std::move(tc));
    }
    sc.mix = TrafficMix::from_ratios(std::move(classes));

    if (doc.contains("policies")) {
      if (!doc.at("policies").is_array()) field_error(source, "policies", "expected an array");
      const json& ps = doc.at("policies");
      for (std::size_t i = 0; i < ps.size(); ++i)
        sc.policies.push_back(parse_policy(ps[i], "policies[" + std::to_string(i) + "]", source));
    } else {
      sc.policies = {SchemePolicy::proposed(), SchemePolicy::non_prioritized(), SchemePolicy::hard(),
                     SchemePolicy::guard(0.05)};
    }

    const json& sw = req_object(doc, "sweep", "", source);
    if (!sw.contains("vary") || !sw.at("vary").is_string()) field_error(source, "sweep.vary", "expected a string");
    sc.sweep.vary = parse_axis(sw.at("vary").get<std::string>(), source);
    if (!sw.contains("values") || !sw.at("values").is_array()) field_error(source, "sweep.values", "expected an array");
    for (std::size_t i = 0; i < sw.at("values").size(); ++i) {
      const json& v = sw.at("values")[i];
      if (!v.is_number()) field_error(source, "sweep.values[" + std::to_string(i) + "]", "expected a number");
      sc.sweep.values.push_back(v.get<double>());
    }
    sc.sweep.handover_ratio = opt_number(sw, "handover_ratio", "sweep.", source).value_or(0.5);
    sc.sweep.lambda_new = opt_number(sw, "lambda_new", "sweep.", source).value_or(0.0);
    sc.sweep.lambda_handover = opt_number(sw, "lambda_handover", "sweep.", source).value_or(0.0);

    if (doc.contains("sim") && !doc.at("sim").is_null()) {
      const json& s = req_object(doc, "sim", "", source);
      SimSettings settings;
      settings.horizon_s = opt_number(s, "horizon_s", "sim.", source).value_or(settings.horizon_s);
      settings.warmup_s = opt_number(s, "warmup_s", "sim.", source);
      if (s.contains("replications")) {
        if (!s.at("replications").is_number_integer()) field_error(source, "sim.replications", "expected an integer");
        settings.replications = s.at("replications").get<int>();
      }
      if (s.contains("seed")) {
        if (!s.at("seed").is_number_unsigned()) field_error(source, "sim.seed", "expected a non-negative integer");
        settings.seed = s.at("seed").get<std::uint64_t>();
      }
      sc.sim = settings;
    }
    if (doc.contains("output_dir") && doc.at("output_dir").is_string())
      sc.output_dir = doc.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ScenarioError(source + ": " + e.what());
  }

  check_scenario(sc);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.string());
}

}  // namespace cac
