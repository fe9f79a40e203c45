#include "cac/sweep.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "cac/des_simulator.hpp"

namespace cac {

namespace {

struct Dimensions {
  int n = 0, l = 0, s = 0;
};

Dimensions dimensions(const MixAggregates& agg, const CellParameters& cell, const SchemePolicy& policy) {
  Dimensions d;
  d.n = hard_capacity(agg, cell);
  if (policy.scheme() == Scheme::Proposed) {
    d.s = extra_states_handover(agg, cell);
    d.l = extra_states_new(agg, cell);
  } else if (policy.scheme() == Scheme::NonPrioritizedAdaptive) {
    d.s = extra_states_handover(agg, cell);
    d.l = d.s;
  }
  return d;
}

ResultRow base_row(const SchemePolicy& policy, const CellParameters& cell, RowSource source) {
  ResultRow row;
  row.scheme = policy.name();
  row.lambda_new = cell.lambda_new;
  row.lambda_handover = cell.lambda_handover;
  row.source = source;
  return row;
}

ResultRow analytic_row(const Scenario& sc, const MixAggregates& agg, const SchemePolicy& policy,
                       const CellParameters& cell) {
  ResultRow row = base_row(policy, cell, RowSource::Analytic);
  try {
    const ChainModel chain = build_chain(sc.mix, cell, policy);
    const ChainResults r = evaluate(chain, agg, cell);
    row.n_hard = chain.n_hard;
    row.extra_new = chain.extra_new;
    row.extra_handover = chain.extra_handover;
    row.p_block = r.p_block;
    row.p_drop = r.p_drop;
    row.utilization = r.utilization;
    check_row(row);
  } catch (const std::exception& e) {
    row = base_row(policy, cell, RowSource::Analytic);
    row.error = e.what();
  }
  return row;
}

ResultRow sim_row(const Scenario& sc, const MixAggregates& agg, const SchemePolicy& policy,
                  const CellParameters& cell, std::uint64_t seed, unsigned threads) {
  ResultRow row = base_row(policy, cell, RowSource::Sim);
  try {
    sim::SimConfig cfg;
    cfg.mix = sc.mix;
    cfg.cell = cell;
    cfg.policy = policy;
    cfg.horizon = sc.sim->horizon_s;
    cfg.warmup = sc.sim->warmup();
    cfg.replications = sc.sim->replications;
    cfg.seed = seed;
    const sim::SimStats stats = sim::simulate(cfg, threads);
    const Dimensions d = dimensions(agg, cell, policy);
    row.n_hard = d.n;
    row.extra_new = d.l;
    row.extra_handover = d.s;
    row.p_block = stats.p_block.mean;
    row.p_drop = stats.p_drop.mean;
    row.utilization = stats.utilization.mean;
    row.ci_block = stats.p_block.halfwidth;
    row.ci_drop = stats.p_drop.halfwidth;
    row.ci_util = stats.utilization.halfwidth;
    check_row(row);
  } catch (const std::exception& e) {
    row = base_row(policy, cell, RowSource::Sim);
    row.error = e.what();
  }
  return row;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string{}; }
std::string fmt_opt(const std::optional<int>& v) { return v ? fmt::format("{}", *v) : std::string{}; }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_num(const std::string& s, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return value;
}

template <typename T>
std::optional<T> parse_opt(const std::string& s, std::size_t line_no) {
  if (s.empty()) return std::nullopt;
  return parse_num<T>(s, line_no);
}

}  // namespace

const char* to_string(RowSource source) { return source == RowSource::Analytic ? "analytic" : "sim"; }

std::uint64_t grid_seed(std::uint64_t master, std::size_t grid_index) {
  return sim::replication_seed(master ^ 0x5bd1e995ULL, static_cast<int>(grid_index));
}

void check_row(const ResultRow& row) {
  for (const auto& p : {row.p_block, row.p_drop, row.utilization})
    if (p && !(*p >= 0.0 && *p <= 1.0))
      throw std::domain_error(fmt::format("row {} at lambda_new={}: probability {} outside [0,1]", row.scheme,
                                          row.lambda_new, *p));
}

std::vector<ResultRow> run_sweep(const Scenario& scenario, SweepMode mode, unsigned threads) {
  if ((mode == SweepMode::Sim || mode == SweepMode::Both) && !scenario.sim)
    throw std::invalid_argument("scenario has no sim settings; cannot run simulation mode");
  const MixAggregates agg = aggregates(scenario.mix);
  std::vector<ResultRow> rows;
  for (const auto& policy : scenario.policies) {
    for (std::size_t k = 0; k < scenario.sweep.values.size(); ++k) {
      const CellParameters cell = scenario.cell_at(scenario.sweep.values[k]);
      if (mode != SweepMode::Sim) rows.push_back(analytic_row(scenario, agg, policy, cell));
      if (mode != SweepMode::Analytic)
        rows.push_back(sim_row(scenario, agg, policy, cell, grid_seed(scenario.sim->seed, k), threads));
    }
  }
  return rows;
}

void write_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scheme << ',' << fmt::format("{}", r.lambda_new) << ',' << fmt::format("{}", r.lambda_handover) << ','
        << fmt_opt(r.n_hard) << ',' << fmt_opt(r.extra_new) << ',' << fmt_opt(r.extra_handover) << ','
        << fmt_opt(r.p_block) << ',' << fmt_opt(r.p_drop) << ',' << fmt_opt(r.utilization) << ','
        << to_string(r.source) << ',' << fmt_opt(r.ci_block) << ',' << fmt_opt(r.ci_drop) << ','
        << fmt_opt(r.ci_util) << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("CSV header mismatch");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 13)
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected 13 fields");
    ResultRow r;
    r.scheme = c[0];
    r.lambda_new = parse_num<double>(c[1], line_no);
    r.lambda_handover = parse_num<double>(c[2], line_no);
    r.n_hard = parse_opt<int>(c[3], line_no);
    r.extra_new = parse_opt<int>(c[4], line_no);
    r.extra_handover = parse_opt<int>(c[5], line_no);
    r.p_block = parse_opt<double>(c[6], line_no);
    r.p_drop = parse_opt<double>(c[7], line_no);
    r.utilization = parse_opt<double>(c[8], line_no);
    if (c[9] == "analytic")
      r.source = RowSource::Analytic;
    else if (c[9] == "sim")
      r.source = RowSource::Sim;
    else
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": bad source '" + c[9] + "'");
    r.ci_block = parse_opt<double>(c[10], line_no);
    r.ci_drop = parse_opt<double>(c[11], line_no);
    r.ci_util = parse_opt<double>(c[12], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   std::span<const ResultRow> rows, SweepAxis axis) {
  std::filesystem::create_directories(dir);
  const char* x_name = axis == SweepAxis::Handover ? "lambda_handover" : "lambda_new";
  auto x_of = [axis](const ResultRow& r) { return axis == SweepAxis::Handover ? r.lambda_handover : r.lambda_new; };

  // Series keyed by (scheme, source) in first-appearance order.
  std::vector<std::pair<std::string, RowSource>> order;
  std::map<std::pair<std::string, RowSource>, std::vector<const ResultRow*>> series;
  for (const auto& r : rows) {
    if (r.failed()) continue;
    auto key = std::make_pair(r.scheme, r.source);
    if (!series.count(key)) order.push_back(key);
    series[key].push_back(&r);
  }

  struct Figure {
    const char* file;
    const char* metric;
    std::optional<double> ResultRow::*value;
    std::optional<double> ResultRow::*ci;
  };
  const Figure figures[] = {{"p_drop.dat", "p_drop", &ResultRow::p_drop, &ResultRow::ci_drop},
                            {"utilization.dat", "utilization", &ResultRow::utilization, &ResultRow::ci_util}};

  std::vector<std::filesystem::path> written;
  for (const auto& fig : figures) {
    const auto path = dir / fig.file;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# " << fig.metric << " vs " << x_name << "; one block per scheme/source (gnuplot index)\n";
    bool first = true;
    for (const auto& key : order) {
      if (!first) out << "\n\n";
      first = false;
      out << "# scheme=" << key.first << " source=" << to_string(key.second) << '\n';
      out << "# " << x_name << ' ' << fig.metric << " ci\n";
      for (const ResultRow* r : series[key]) {
        out << fmt::format("{}", x_of(*r)) << ' ' << fmt_opt(r->*fig.value) << ' '
            << ((r->*fig.ci) ? fmt::format("{}", *(r->*fig.ci)) : std::string("0")) << '\n';
      }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace cac
