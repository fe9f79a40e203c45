#pragma once

#include <random>
#include <vector>

#include "cac/chain_analytic.hpp"
#include "cac/traffic_model.hpp"

namespace cac::testing {

inline TrafficMix table1_mix() {
  return TrafficMix::from_ratios({
      {"conversational_voice", 1, 25, 0.0, 0.0},
      {"conversational_video", 1, 128, 0.0, 0.0},
      {"realtime_gaming", 1, 56, 0.0, 0.0},
      {"buffered_streaming_video", 1, 128, 0.2, 0.6},
      {"voice_messaging", 1, 13, 0.2, 0.3},
      {"web_browsing", 1, 56, 0.2, 0.5},
      {"background", 1, 56, 0.5, 0.9},
  });
}

inline TrafficMix single_class(double bandwidth, double gamma_new, double gamma_handover) {
  return TrafficMix{{{"only", 1.0, bandwidth, gamma_new, gamma_handover}}};
}

/// Cell with the 120 s call / 240 s dwell defaults.
inline CellParameters cell(double capacity, double lambda_new, double lambda_handover) {
  return CellParameters::from_durations(capacity, lambda_new, lambda_handover, 120.0, 240.0);
}

/// Random mix with 1..max_classes classes; each class is real-time with
/// probability 1/3, otherwise 0 <= gamma_new <= gamma_handover < 0.95.
inline TrafficMix random_mix(std::mt19937_64& rng, int max_classes = 8) {
  std::uniform_int_distribution<int> count(1, max_classes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> bw(8.0, 256.0);
  std::vector<TrafficClass> classes;
  const int m = count(rng);
  for (int i = 0; i < m; ++i) {
    TrafficClass c;
    c.name = "c" + std::to_string(i);
    c.weight = 0.05 + unit(rng);
    c.bandwidth_req = bw(rng);
    if (unit(rng) > 1.0 / 3.0) {
      c.gamma_handover = 0.95 * unit(rng);
      c.gamma_new = c.gamma_handover * unit(rng);
    }
    classes.push_back(c);
  }
  return TrafficMix::from_ratios(std::move(classes));
}

inline SchemePolicy random_policy(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return SchemePolicy::proposed();
    case 1: return SchemePolicy::non_prioritized();
    case 2: return SchemePolicy::hard();
    default: return SchemePolicy::guard(std::uniform_real_distribution<double>(0.0, 0.2)(rng));
  }
}

}  // namespace cac::testing
