#include "cac/chain_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cac {

namespace {

// The quotients below are exact integers for hand-built configs (e.g.
// 1000*50/(50*100)) but normalized weights like 1/7 leave them one ulp short.
// Floors/ceils absorb a relative error of a few ulps before rounding.
constexpr double kRoundingSlack = 1e-12;

int tolerant_floor(double x) {
  return static_cast<int>(std::floor(x + kRoundingSlack * std::max(1.0, std::abs(x))));
}

int tolerant_ceil(double x) {
  return static_cast<int>(std::ceil(x - kRoundingSlack * std::max(1.0, std::abs(x))));
}

int extra_states(double degradable, const MixAggregates& agg, const CellParameters& cell) {
  if (degradable <= 0.0) return 0;
  const double retained = agg.mean_demand - degradable;
  return tolerant_floor(cell.capacity * degradable / (retained * agg.mean_demand));
}

double log_sum_exp(const std::vector<double>& xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

}  // namespace

SchemePolicy SchemePolicy::guard(double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw std::invalid_argument("guard fraction must lie in [0, 1)");
  return SchemePolicy(Scheme::HardGuard, fraction);
}

SchemePolicy SchemePolicy::parse(const std::string& text) {
  if (text == "proposed") return proposed();
  if (text == "non_prioritized") return non_prioritized();
  if (text == "hard") return hard();
  if (text.rfind("guard:", 0) == 0) {
    const std::string value = text.substr(6);
    std::size_t used = 0;
    double g = 0.0;
    try {
      g = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size())
      throw std::invalid_argument("bad guard fraction in policy '" + text + "'");
    return guard(g);
  }
  throw std::invalid_argument("unknown policy '" + text +
                              "' (expected proposed, non_prioritized, hard or guard:<fraction>)");
}

std::string SchemePolicy::name() const {
  switch (scheme_) {
    case Scheme::Proposed: return "proposed";
    case Scheme::NonPrioritizedAdaptive: return "non_prioritized";
    case Scheme::HardNoGuard: return "hard";
    case Scheme::HardGuard: {
      std::ostringstream os;
      os << "guard:" << *guard_;
      return os.str();
    }
  }
  return "unknown";
}

int hard_capacity(const MixAggregates& agg, const CellParameters& cell) {
  return tolerant_floor(cell.capacity / agg.mean_demand);
}

int extra_states_handover(const MixAggregates& agg, const CellParameters& cell) {
  return extra_states(agg.degradable_handover, agg, cell);
}

int extra_states_new(const MixAggregates& agg, const CellParameters& cell) {
  return extra_states(agg.degradable_new, agg, cell);
}

double degradation_level(int i, const MixAggregates& agg, const CellParameters& cell) {
  if (i <= hard_capacity(agg, cell)) return 0.0;
  if (agg.degradable_handover <= 0.0) {
    std::ostringstream os;
    os << "state " << i << " exceeds hard capacity but the mix has no degradable bandwidth";
    throw ChainError(os.str());
  }
  const double theta = (i * agg.mean_demand - cell.capacity) / (i * agg.degradable_handover);
  return std::clamp(theta, 0.0, 1.0);
}

double release_rate(int i, const MixAggregates& agg, const CellParameters& cell) {
  const double theta = degradation_level(i, agg, cell);
  return cell.dwell_rate + cell.completion_rate * (1.0 - theta * agg.mean_gamma_handover);
}

ChainModel build_chain(const TrafficMix& mix, const CellParameters& cell, const SchemePolicy& policy) {
  if (auto report = validate(mix, cell); !report.ok()) throw ValidationError(std::move(report));
  const MixAggregates agg = aggregates(mix);

  ChainModel chain;
  chain.policy = policy;
  chain.n_hard = hard_capacity(agg, cell);
  const double lambda_all = cell.total_arrival_rate();

  int handover_only_from = 0;  // first state where only handovers are admitted
  switch (policy.scheme()) {
    case Scheme::Proposed:
      chain.extra_handover = extra_states_handover(agg, cell);
      chain.extra_new = extra_states_new(agg, cell);
      chain.max_state = chain.n_hard + chain.extra_handover;
      chain.new_cutoff = chain.n_hard + chain.extra_new;
      break;
    case Scheme::NonPrioritizedAdaptive:
      chain.extra_handover = extra_states_handover(agg, cell);
      chain.extra_new = chain.extra_handover;
      chain.max_state = chain.n_hard + chain.extra_handover;
      chain.new_cutoff = chain.max_state;
      break;
    case Scheme::HardNoGuard:
      chain.max_state = chain.n_hard;
      chain.new_cutoff = chain.n_hard;
      break;
    case Scheme::HardGuard: {
      const int reserved = tolerant_ceil(*policy.guard_fraction() * cell.capacity / agg.mean_demand);
      chain.max_state = chain.n_hard;
      chain.new_cutoff = chain.n_hard - reserved;
      if (chain.new_cutoff < 0) {
        std::ostringstream os;
        os << "guard band reserves " << reserved << " call slots but hard capacity is only "
           << chain.n_hard;
        throw ChainError(os.str());
      }
      break;
    }
  }
  handover_only_from = chain.new_cutoff;
  if (chain.max_state == 0) throw ChainError("degenerate chain: cell cannot hold a single call");

  const int k = chain.max_state;
  chain.birth_rates.resize(k);
  chain.death_rates.resize(k);
  const double mu_undegraded = cell.base_release_rate();
  for (int i = 0; i < k; ++i)
    chain.birth_rates[i] = i < handover_only_from ? lambda_all : cell.lambda_handover;
  for (int i = 1; i <= k; ++i) {
    const double mu_i = policy.is_adaptive() ? release_rate(i, agg, cell) : mu_undegraded;
    chain.death_rates[i - 1] = i * mu_i;
  }

  // log P(i) - log P(0) = sum_{j<i} log birth(j) - sum_{j<=i} log death(j)
  std::vector<double> log_weight(k + 1);
  log_weight[0] = 0.0;
  for (int i = 1; i <= k; ++i)
    log_weight[i] = log_weight[i - 1] + std::log(chain.birth_rates[i - 1]) - std::log(chain.death_rates[i - 1]);
  const double log_norm = log_sum_exp(log_weight);
  chain.stationary.resize(k + 1);
  for (int i = 0; i <= k; ++i) chain.stationary[i] = std::exp(log_weight[i] - log_norm);
  return chain;
}

double blocking_probability(const ChainModel& chain) {
  double p = 0.0;
  for (int i = chain.new_cutoff; i <= chain.max_state; ++i) p += chain.stationary[i];
  return std::min(p, 1.0);
}

double dropping_probability(const ChainModel& chain) { return chain.stationary[chain.max_state]; }

double utilization(const ChainModel& chain, const MixAggregates& agg, const CellParameters& cell) {
  double u = 0.0;
  for (int i = 0; i <= chain.max_state; ++i)
    u += chain.stationary[i] * std::min(i * agg.mean_demand, cell.capacity);
  return std::clamp(u / cell.capacity, 0.0, 1.0);
}

double mean_occupancy(const ChainModel& chain) {
  double n = 0.0;
  for (int i = 0; i <= chain.max_state; ++i) n += i * chain.stationary[i];
  return n;
}

ChainResults evaluate(const ChainModel& chain, const MixAggregates& agg, const CellParameters& cell) {
  return {blocking_probability(chain), dropping_probability(chain), utilization(chain, agg, cell),
          mean_occupancy(chain)};
}

}  // namespace cac
