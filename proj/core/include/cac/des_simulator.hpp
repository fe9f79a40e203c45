#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cac/chain_analytic.hpp"
#include "cac/traffic_model.hpp"

namespace cac::sim {

enum class Origin { New, Handover };

/// One admitted call. Elastic calls (gamma_handover > 0) carry a work volume
/// served at allocated_bw; real-time calls carry a fixed completion instant.
struct CallRecord {
  std::uint64_t id = 0;
  std::size_t class_index = 0;
  Origin origin = Origin::New;
  bool elastic = false;
  double remaining_work = 0.0;   // kbit, elastic only
  double completion_time = 0.0;  // +inf when the call never completes
  double dwell_deadline = 0.0;   // +inf when dwell_rate is 0
  double current_gamma = 0.0;
  double allocated_bw = 0.0;     // (1 - current_gamma) * bandwidth_req
  double admitted_at = 0.0;
  double last_update = 0.0;      // instant remaining_work was last brought current
  std::uint64_t version = 0;     // bumped whenever completion_time is rescheduled
};

struct SimConfig {
  TrafficMix mix;
  CellParameters cell;
  SchemePolicy policy = SchemePolicy::proposed();
  double horizon = 1e5;  // simulated seconds
  double warmup = 1e4;
  int replications = 1;
  std::uint64_t seed = 1;

  /// Warmup defaults to 10% of the horizon.
  static constexpr double kDefaultWarmupFraction = 0.1;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Estimate {
  double mean = 0.0;
  std::optional<double> halfwidth;  // 95% CI, absent for a single replication
};

struct SimCounts {
  std::uint64_t offered_new = 0;
  std::uint64_t blocked_new = 0;
  std::uint64_t offered_handover = 0;
  std::uint64_t dropped_handover = 0;
  std::uint64_t departures = 0;    // calls admitted after warmup that have left
  std::uint64_t handover_out = 0;  // of those, left by dwell expiry

  SimCounts& operator+=(const SimCounts& o);
};

struct ReplicationStats {
  double p_block = 0.0;
  double p_drop = 0.0;
  double utilization = 0.0;
  double mean_call_duration = 0.0;
  double handover_out_fraction = 0.0;
  SimCounts counts;
};

struct SimStats {
  Estimate p_block;
  Estimate p_drop;
  Estimate utilization;
  Estimate mean_call_duration;
  Estimate handover_out_fraction;
  SimCounts counts;  // summed over replications
  int replications = 0;
};

enum class EventKind { NewArrival, HandoverArrival, Completion, DwellExpiry };

const char* to_string(EventKind kind);

/// Cell state right after an event has been handled.
struct EventSnapshot {
  double time = 0.0;
  EventKind kind = EventKind::NewArrival;
  std::size_t class_index = 0;
  bool admitted = false;  // arrivals only
  double theta = 0.0;     // common degradation level
  double total_demand = 0.0;
  double total_allocated = 0.0;
  std::span<const CallRecord> calls;
};

using Observer = std::function<void(const EventSnapshot&)>;

/// Admission test against the per-class occupancy of the cell.
bool admission_decision(std::span<const int> active_per_class, std::size_t arriving_class,
                        Origin origin, const SchemePolicy& policy, const TrafficMix& mix,
                        const CellParameters& cell);

/// Common degradation level for a given total requested and degradable
/// bandwidth. Zero when the demand fits.
double common_degradation(double total_demand, double degradable, double capacity);

/// Sets every call's gamma to theta * gamma_handover, brings elastic work
/// current to `now` and reprojects completion instants. Returns theta.
/// Throws SimulationError when theta would exceed 1.
double rebalance(std::span<CallRecord> calls, const TrafficMix& mix, const CellParameters& cell,
                 double now);

/// One replication. Deterministic in (config, seed); config.seed and
/// config.replications are ignored.
ReplicationStats run_replication(const SimConfig& config, std::uint64_t seed,
                                 const Observer& observer = {});

/// Mean and t-based 95% confidence halfwidth across replications.
SimStats aggregate(std::span<const ReplicationStats> reps);

/// Seed for replication r derived from a master seed.
std::uint64_t replication_seed(std::uint64_t master, int replication);

/// Runs config.replications independent replications and aggregates them.
/// Replications run on up to `threads` workers (0 = hardware concurrency);
/// results do not depend on the thread count.
SimStats simulate(const SimConfig& config, unsigned threads = 1);

/// Observer writing one CSV line per event:
/// time,kind,class,state_size,total_allocated. Writes the header immediately.
Observer csv_trace(std::ostream& out);

/// Two-sided 97.5% Student-t quantile.
double t_quantile_975(int degrees_of_freedom);

}  // namespace cac::sim
