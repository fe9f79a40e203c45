#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cac/traffic_model.hpp"

namespace cac {

enum class Scheme {
  Proposed,                // separate new/handover degradation caps
  NonPrioritizedAdaptive,  // handover caps apply to every arrival
  HardNoGuard,             // no degradation, no reservation
  HardGuard,               // no degradation, a fraction of C reserved for handovers
};

/// Admission scheme. The guard fraction exists only for Scheme::HardGuard.
class SchemePolicy {
 public:
  static SchemePolicy proposed() { return SchemePolicy(Scheme::Proposed, std::nullopt); }
  static SchemePolicy non_prioritized() { return SchemePolicy(Scheme::NonPrioritizedAdaptive, std::nullopt); }
  static SchemePolicy hard() { return SchemePolicy(Scheme::HardNoGuard, std::nullopt); }
  static SchemePolicy guard(double fraction);

  /// Accepts "proposed", "non_prioritized", "hard" and "guard:<fraction>".
  static SchemePolicy parse(const std::string& text);

  Scheme scheme() const { return scheme_; }
  std::optional<double> guard_fraction() const { return guard_; }
  bool is_adaptive() const {
    return scheme_ == Scheme::Proposed || scheme_ == Scheme::NonPrioritizedAdaptive;
  }

  /// Inverse of parse(); used as the CSV scheme column.
  std::string name() const;

  friend bool operator==(const SchemePolicy&, const SchemePolicy&) = default;

 private:
  SchemePolicy(Scheme s, std::optional<double> g) : scheme_(s), guard_(g) {}
  Scheme scheme_;
  std::optional<double> guard_;
};

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChainModel {
  SchemePolicy policy = SchemePolicy::proposed();
  int n_hard = 0;          // N
  int extra_new = 0;       // L
  int extra_handover = 0;  // S
  int max_state = 0;       // K = N + S (N for hard schemes)
  int new_cutoff = 0;      // new calls are rejected in states >= new_cutoff
  std::vector<double> birth_rates;  // [i] = rate out of state i upward, i in 0..K-1
  std::vector<double> death_rates;  // [i-1] = i * mu_i, rate out of state i downward
  std::vector<double> stationary;   // P(0..K)
};

struct ChainResults {
  double p_block = 0.0;
  double p_drop = 0.0;
  double utilization = 0.0;
  double mean_occupancy = 0.0;
};

/// N = floor(C / mean demand).
int hard_capacity(const MixAggregates& agg, const CellParameters& cell);

/// S = floor(C * D_h / ((mean - D_h) * mean)).
int extra_states_handover(const MixAggregates& agg, const CellParameters& cell);

/// L = floor(C * D_n / ((mean - D_n) * mean)).
int extra_states_new(const MixAggregates& agg, const CellParameters& cell);

/// Common degradation fraction theta(i) in [0,1] applied to each call's
/// handover cap when the cell holds i calls. Throws ChainError when i > N
/// and the mix has nothing to degrade.
double degradation_level(int i, const MixAggregates& agg, const CellParameters& cell);

/// Per-call channel release rate in state i: eta + mu * (1 - theta(i) * G).
double release_rate(int i, const MixAggregates& agg, const CellParameters& cell);

/// Builds the birth-death chain for a policy and solves its stationary
/// distribution in the log domain. Throws ValidationError for invalid inputs,
/// ChainError for a guard band larger than N or a chain with no states
/// above 0.
ChainModel build_chain(const TrafficMix& mix, const CellParameters& cell, const SchemePolicy& policy);

double blocking_probability(const ChainModel& chain);
double dropping_probability(const ChainModel& chain);
double utilization(const ChainModel& chain, const MixAggregates& agg, const CellParameters& cell);
double mean_occupancy(const ChainModel& chain);

ChainResults evaluate(const ChainModel& chain, const MixAggregates& agg, const CellParameters& cell);

}  // namespace cac
