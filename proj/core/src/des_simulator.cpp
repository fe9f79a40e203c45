#include "cac/des_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

namespace cac::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCapacitySlack = 1e-9;

enum Stream : std::uint32_t { kArrivals = 0, kClassChoice = 1, kWork = 2, kDwell = 3 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

double exponential(std::mt19937_64& rng, double rate) {
  if (!(rate > 0.0)) return kInf;
  return std::exponential_distribution<double>(rate)(rng);
}

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::uint64_t call_id;
  std::uint64_t version;

  bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

class Replication {
 public:
  Replication(const SimConfig& config, std::uint64_t seed, const Observer& observer)
      : cfg_(config),
        observer_(observer),
        arrivals_(make_stream(seed, kArrivals)),
        class_choice_(make_stream(seed, kClassChoice)),
        work_(make_stream(seed, kWork)),
        dwell_(make_stream(seed, kDwell)),
        active_per_class_(config.mix.size(), 0) {
    std::vector<double> weights;
    for (const auto& c : config.mix.classes) weights.push_back(c.weight);
    pick_class_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
  }

  ReplicationStats run() {
    push(exponential(arrivals_, cfg_.cell.lambda_new), EventKind::NewArrival, 0, 0);
    push(exponential(arrivals_, cfg_.cell.lambda_handover), EventKind::HandoverArrival, 0, 0);

    while (!events_.empty()) {
      const Event ev = events_.top();
      if (ev.time > cfg_.horizon) break;
      events_.pop();
      if (!is_live(ev)) continue;
      advance(ev.time);
      handle(ev);
    }
    advance(cfg_.horizon);
    return finish();
  }

 private:
  void push(double time, EventKind kind, std::uint64_t call_id, std::uint64_t version) {
    if (std::isfinite(time)) events_.push({time, seq_++, kind, call_id, version});
  }

  bool is_live(const Event& ev) const {
    if (ev.kind == EventKind::NewArrival || ev.kind == EventKind::HandoverArrival) return true;
    auto it = index_of_.find(ev.call_id);
    if (it == index_of_.end()) return false;
    return ev.kind == EventKind::DwellExpiry || calls_[it->second].version == ev.version;
  }

  // Integrates allocated bandwidth over the post-warmup part of [now_, t].
  void advance(double t) {
    const double from = std::max(now_, cfg_.warmup);
    if (t > from) busy_integral_ += total_allocated_ * (t - from);
    now_ = t;
  }

  void handle(const Event& ev) {
    std::size_t cls = 0;
    bool admitted = false;
    switch (ev.kind) {
      case EventKind::NewArrival:
      case EventKind::HandoverArrival: {
        const bool handover = ev.kind == EventKind::HandoverArrival;
        push(now_ + exponential(arrivals_, handover ? cfg_.cell.lambda_handover : cfg_.cell.lambda_new),
             ev.kind, 0, 0);
        cls = pick_class_(class_choice_);
        const Origin origin = handover ? Origin::Handover : Origin::New;
        admitted = admission_decision(active_per_class_, cls, origin, cfg_.policy, cfg_.mix, cfg_.cell);
        if (now_ >= cfg_.warmup) {
          if (handover) {
            ++counts_.offered_handover;
            if (!admitted) ++counts_.dropped_handover;
          } else {
            ++counts_.offered_new;
            if (!admitted) ++counts_.blocked_new;
          }
        }
        if (admitted) admit(cls, origin);
        break;
      }
      case EventKind::Completion:
      case EventKind::DwellExpiry: {
        const std::size_t idx = index_of_.at(ev.call_id);
        cls = calls_[idx].class_index;
        depart(idx, ev.kind == EventKind::DwellExpiry);
        break;
      }
    }
    check_capacity();
    if (observer_) {
      observer_(EventSnapshot{now_, ev.kind, cls, admitted, theta_, total_demand_, total_allocated_, calls_});
    }
  }

  void admit(std::size_t cls, Origin origin) {
    const TrafficClass& tc = cfg_.mix[cls];
    CallRecord call;
    call.id = next_id_++;
    call.class_index = cls;
    call.origin = origin;
    call.elastic = !tc.is_real_time();
    call.admitted_at = now_;
    call.last_update = now_;
    call.current_gamma = theta_ * tc.gamma_handover;
    call.allocated_bw = (1.0 - call.current_gamma) * tc.bandwidth_req;
    if (call.elastic) {
      const double mu = cfg_.cell.completion_rate;
      call.remaining_work = mu > 0.0 ? exponential(work_, mu / tc.bandwidth_req) : kInf;
      call.completion_time = now_ + call.remaining_work / call.allocated_bw;
    } else {
      call.completion_time = now_ + exponential(work_, cfg_.cell.completion_rate);
    }
    call.dwell_deadline = now_ + exponential(dwell_, cfg_.cell.dwell_rate);

    ++active_per_class_[cls];
    index_of_[call.id] = calls_.size();
    calls_.push_back(call);
    push(call.completion_time, EventKind::Completion, call.id, call.version);
    push(call.dwell_deadline, EventKind::DwellExpiry, call.id, 0);
    refresh_allocations();
  }

  void depart(std::size_t idx, bool by_dwell) {
    const CallRecord call = calls_[idx];
    if (call.admitted_at >= cfg_.warmup) {
      ++counts_.departures;
      if (by_dwell) ++counts_.handover_out;
      duration_sum_ += now_ - call.admitted_at;
    }
    --active_per_class_[call.class_index];
    index_of_.erase(call.id);
    if (idx + 1 != calls_.size()) {
      calls_[idx] = calls_.back();
      index_of_[calls_[idx].id] = idx;
    }
    calls_.pop_back();
    refresh_allocations();
  }

  // Re-derives theta after a change in cell membership; reprojects elastic
  // completions only when theta actually moved.
  void refresh_allocations() {
    total_demand_ = 0.0;
    degradable_ = 0.0;
    for (std::size_t m = 0; m < cfg_.mix.size(); ++m) {
      total_demand_ += active_per_class_[m] * cfg_.mix[m].bandwidth_req;
      degradable_ += active_per_class_[m] * cfg_.mix[m].gamma_handover * cfg_.mix[m].bandwidth_req;
    }
    const double theta = common_degradation(total_demand_, degradable_, cfg_.cell.capacity);
    if (theta != theta_) {
      theta_ = rebalance(calls_, cfg_.mix, cfg_.cell, now_);
      for (auto& call : calls_) {
        if (!call.elastic) continue;
        ++call.version;
        push(call.completion_time, EventKind::Completion, call.id, call.version);
      }
    }
    total_allocated_ = 0.0;
    for (const auto& call : calls_) total_allocated_ += call.allocated_bw;
  }

  void check_capacity() const {
    if (total_allocated_ > cfg_.cell.capacity * (1.0 + kCapacitySlack)) {
      std::ostringstream os;
      os << "allocated bandwidth " << total_allocated_ << " exceeds capacity " << cfg_.cell.capacity
         << " at t=" << now_;
      throw SimulationError(os.str());
    }
  }

  ReplicationStats finish() const {
    ReplicationStats s;
    s.counts = counts_;
    auto ratio = [](std::uint64_t num, std::uint64_t den) {
      return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    s.p_block = ratio(counts_.blocked_new, counts_.offered_new);
    s.p_drop = ratio(counts_.dropped_handover, counts_.offered_handover);
    const double window = cfg_.horizon - cfg_.warmup;
    s.utilization = window > 0.0 ? std::clamp(busy_integral_ / (window * cfg_.cell.capacity), 0.0, 1.0) : 0.0;
    s.mean_call_duration = counts_.departures == 0 ? 0.0 : duration_sum_ / static_cast<double>(counts_.departures);
    s.handover_out_fraction = ratio(counts_.handover_out, counts_.departures);
    return s;
  }

  const SimConfig& cfg_;
  const Observer& observer_;
  std::mt19937_64 arrivals_;
  std::mt19937_64 class_choice_;
  std::mt19937_64 work_;
  std::mt19937_64 dwell_;
  std::discrete_distribution<std::size_t> pick_class_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_id_ = 0;
  double now_ = 0.0;

  std::vector<CallRecord> calls_;
  std::unordered_map<std::uint64_t, std::size_t> index_of_;
  std::vector<int> active_per_class_;
  double total_demand_ = 0.0;
  double degradable_ = 0.0;
  double total_allocated_ = 0.0;
  double theta_ = 0.0;

  SimCounts counts_;
  double busy_integral_ = 0.0;
  double duration_sum_ = 0.0;
};

Estimate estimate(const std::vector<double>& xs) {
  Estimate e;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) e.mean += x;
  e.mean /= n;
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    e.halfwidth = t_quantile_975(static_cast<int>(xs.size()) - 1) * sd / std::sqrt(n);
  }
  return e;
}

}  // namespace

SimCounts& SimCounts::operator+=(const SimCounts& o) {
  offered_new += o.offered_new;
  blocked_new += o.blocked_new;
  offered_handover += o.offered_handover;
  dropped_handover += o.dropped_handover;
  departures += o.departures;
  handover_out += o.handover_out;
  return *this;
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::NewArrival: return "new_arrival";
    case EventKind::HandoverArrival: return "handover_arrival";
    case EventKind::Completion: return "completion";
    case EventKind::DwellExpiry: return "dwell_expiry";
  }
  return "unknown";
}

bool admission_decision(std::span<const int> active_per_class, std::size_t arriving_class,
                        Origin origin, const SchemePolicy& policy, const TrafficMix& mix,
                        const CellParameters& cell) {
  const double slack = kCapacitySlack * cell.capacity;
  if (!policy.is_adaptive()) {
    double requested = mix[arriving_class].bandwidth_req;
    for (std::size_t m = 0; m < mix.size(); ++m) requested += active_per_class[m] * mix[m].bandwidth_req;
    double limit = cell.capacity;
    if (policy.scheme() == Scheme::HardGuard && origin == Origin::New)
      limit = (1.0 - *policy.guard_fraction()) * cell.capacity;
    return requested <= limit + slack;
  }
  const bool new_caps = policy.scheme() == Scheme::Proposed && origin == Origin::New;
  auto floor_bw = [&](std::size_t m) {
    return new_caps ? mix[m].min_bandwidth_new() : mix[m].min_bandwidth_handover();
  };
  double committed = floor_bw(arriving_class);
  for (std::size_t m = 0; m < mix.size(); ++m) committed += active_per_class[m] * floor_bw(m);
  return committed <= cell.capacity + slack;
}

double common_degradation(double total_demand, double degradable, double capacity) {
  if (total_demand <= capacity) return 0.0;
  const double theta = degradable > 0.0 ? (total_demand - capacity) / degradable : kInf;
  if (theta > 1.0 + kCapacitySlack) {
    std::ostringstream os;
    os << "demand " << total_demand << " cannot be degraded into capacity " << capacity
       << " (theta = " << theta << ")";
    throw SimulationError(os.str());
  }
  return std::min(theta, 1.0);
}

double rebalance(std::span<CallRecord> calls, const TrafficMix& mix, const CellParameters& cell,
                 double now) {
  double demand = 0.0;
  double degradable = 0.0;
  for (const auto& call : calls) {
    demand += mix[call.class_index].bandwidth_req;
    degradable += mix[call.class_index].gamma_handover * mix[call.class_index].bandwidth_req;
  }
  const double theta = common_degradation(demand, degradable, cell.capacity);
  for (auto& call : calls) {
    const TrafficClass& tc = mix[call.class_index];
    if (call.elastic) {
      call.remaining_work = std::max(0.0, call.remaining_work - call.allocated_bw * (now - call.last_update));
      call.last_update = now;
    }
    call.current_gamma = theta * tc.gamma_handover;
    call.allocated_bw = (1.0 - call.current_gamma) * tc.bandwidth_req;
    if (call.elastic) call.completion_time = now + call.remaining_work / call.allocated_bw;
  }
  return theta;
}

ReplicationStats run_replication(const SimConfig& config, std::uint64_t seed, const Observer& observer) {
  if (auto report = validate(config.mix, config.cell); !report.ok()) throw ValidationError(std::move(report));
  if (!(config.warmup >= 0.0 && config.warmup < config.horizon))
    throw std::invalid_argument("simulation needs 0 <= warmup < horizon");
  return Replication(config, seed, observer).run();
}

SimStats aggregate(std::span<const ReplicationStats> reps) {
  if (reps.empty()) throw std::invalid_argument("aggregate needs at least one replication");
  std::vector<double> pb, pd, u, dur, ho;
  SimStats out;
  for (const auto& r : reps) {
    pb.push_back(r.p_block);
    pd.push_back(r.p_drop);
    u.push_back(r.utilization);
    dur.push_back(r.mean_call_duration);
    ho.push_back(r.handover_out_fraction);
    out.counts += r.counts;
  }
  out.p_block = estimate(pb);
  out.p_drop = estimate(pd);
  out.utilization = estimate(u);
  out.mean_call_duration = estimate(dur);
  out.handover_out_fraction = estimate(ho);
  out.replications = static_cast<int>(reps.size());
  return out;
}

std::uint64_t replication_seed(std::uint64_t master, int replication) {
  // splitmix64 finalizer over (master, replication)
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(replication) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SimStats simulate(const SimConfig& config, unsigned threads) {
  if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
  const auto n = static_cast<std::size_t>(config.replications);
  std::vector<ReplicationStats> reps(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

  if (threads <= 1) {
    for (std::size_t r = 0; r < n; ++r)
      reps[r] = run_replication(config, replication_seed(config.seed, static_cast<int>(r)));
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t r = w; r < n; r += threads)
              reps[r] = run_replication(config, replication_seed(config.seed, static_cast<int>(r)));
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return aggregate(reps);
}

Observer csv_trace(std::ostream& out) {
  out << "time,kind,class,state_size,total_allocated\n";
  return [&out](const EventSnapshot& s) {
    out << s.time << ',' << to_string(s.kind) << ',' << (s.class_index + 1) << ',' << s.calls.size() << ','
        << s.total_allocated << '\n';
  };
}

double t_quantile_975(int degrees_of_freedom) {
  if (degrees_of_freedom < 1) throw std::invalid_argument("t quantile needs df >= 1");
  boost::math::students_t dist(static_cast<double>(degrees_of_freedom));
  return boost::math::quantile(dist, 0.975);
}

}  // namespace cac::sim
