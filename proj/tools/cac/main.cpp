// cac: batch front end for the admission-control models.
//
//   cac analytic --config scenarios/reference_sweep.json --out results/
//   cac simulate --config ... --seed 7 --format plot
//   cac compare  --config ...            (analytic and sim rows side by side)
//   cac validate --config ...
//
// Exit codes: 0 success, 1 invalid configuration, 2 runtime failure
// (including any failed sweep row).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cac/des_simulator.hpp"
#include "cac/scenario.hpp"
#include "cac/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

struct RunOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  unsigned threads = 1;
  std::string trace_dir;
};

std::string file_safe(std::string s) {
  std::replace(s.begin(), s.end(), ':', '-');
  return s;
}

void write_traces(const cac::Scenario& sc, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& policy : sc.policies) {
    for (std::size_t k = 0; k < sc.sweep.values.size(); ++k) {
      cac::sim::SimConfig cfg;
      cfg.mix = sc.mix;
      cfg.cell = sc.cell_at(sc.sweep.values[k]);
      cfg.policy = policy;
      cfg.horizon = sc.sim->horizon_s;
      cfg.warmup = sc.sim->warmup();
      const auto path = dir / ("trace_" + file_safe(policy.name()) + "_" + std::to_string(k) + ".csv");
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      cac::sim::run_replication(cfg, cac::sim::replication_seed(cac::grid_seed(sc.sim->seed, k), 0),
                                cac::sim::csv_trace(out));
    }
  }
}

int run(const RunOptions& opt, cac::SweepMode mode) {
  cac::Scenario sc = cac::load_scenario(opt.config);
  if (opt.seed) {
    if (!sc.sim) sc.sim = cac::SimSettings{};
    sc.sim->seed = *opt.seed;
  }
  if (mode != cac::SweepMode::Analytic && !sc.sim) sc.sim = cac::SimSettings{};

  const auto rows = cac::run_sweep(sc, mode, opt.threads);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.failed()) continue;
    ++failed;
    std::cerr << "warning: " << r.scheme << " (" << cac::to_string(r.source) << ") at lambda_new=" << r.lambda_new
              << " lambda_handover=" << r.lambda_handover << " failed: " << *r.error << '\n';
  }

  std::string out_dir = opt.out;
  if (out_dir.empty() && sc.output_dir) out_dir = *sc.output_dir;

  if (opt.format == "plot") {
    for (const auto& p : cac::write_plot_data(out_dir.empty() ? "." : out_dir, rows, sc.sweep.vary))
      std::cerr << "wrote " << p.string() << '\n';
  } else if (out_dir.empty()) {
    cac::write_csv(std::cout, rows);
  } else {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "results.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    cac::write_csv(out, rows);
    if (!out) throw std::runtime_error("write failed for " + path.string());
    std::cerr << "wrote " << path.string() << '\n';
  }

  if (!opt.trace_dir.empty()) write_traces(sc, opt.trace_dir);
  return failed == 0 ? kExitOk : kExitRuntime;
}

int validate_only(const std::string& config) {
  const cac::Scenario sc = cac::load_scenario(config);
  const auto agg = cac::aggregates(sc.mix);
  std::cout << "ok: " << sc.mix.size() << " classes, mean demand " << agg.mean_demand << " kbit/s, "
            << sc.policies.size() << " policies, " << sc.sweep.values.size() << " grid points ("
            << cac::to_string(sc.sweep.vary) << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive multi-level bandwidth admission control: analytic chain and simulator"};
  app.require_subcommand(1);

  RunOptions opt;
  auto add_common = [&opt](CLI::App* sub, bool sim) {
    sub->add_option("--config", opt.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (CSV goes to stdout when omitted)");
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "plot"}));
    if (sim) {
      sub->add_option("--seed", opt.seed, "Master seed (overrides the config)");
      sub->add_option("--threads", opt.threads, "Replication worker threads (0 = all cores)");
      sub->add_option("--trace", opt.trace_dir, "Write per-event CSV traces of replication 0 to this directory");
    }
  };

  auto* analytic = app.add_subcommand("analytic", "Evaluate the birth-death chain over the sweep");
  add_common(analytic, false);
  auto* simulate = app.add_subcommand("simulate", "Run the discrete-event simulator over the sweep");
  add_common(simulate, true);
  auto* compare = app.add_subcommand("compare", "Analytic and simulated rows for every grid point");
  add_common(compare, true);
  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("--config", opt.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*analytic) return run(opt, cac::SweepMode::Analytic);
    if (*simulate) return run(opt, cac::SweepMode::Sim);
    if (*compare) return run(opt, cac::SweepMode::Both);
    return validate_only(opt.config);
  } catch (const cac::ValidationError& e) {
    std::cerr << "error: " << e.what();
    return kExitInvalid;
  } catch (const cac::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
