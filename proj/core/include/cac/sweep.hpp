#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cac/scenario.hpp"

namespace cac {

enum class SweepMode { Analytic, Sim, Both };
enum class RowSource { Analytic, Sim };

struct ResultRow {
  std::string scheme;
  double lambda_new = 0.0;
  double lambda_handover = 0.0;
  std::optional<int> n_hard;
  std::optional<int> extra_new;
  std::optional<int> extra_handover;
  std::optional<double> p_block;
  std::optional<double> p_drop;
  std::optional<double> utilization;
  RowSource source = RowSource::Analytic;
  std::optional<double> ci_block;
  std::optional<double> ci_drop;
  std::optional<double> ci_util;
  std::optional<std::string> error;  // set on a failed row; metrics are then empty

  bool failed() const { return error.has_value(); }
  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "scheme,lambda_new,lambda_handover,N,L,S,p_block,p_drop,utilization,source,ci_block,ci_drop,ci_util";

/// One row per (policy, grid value, source), ordered by policy, then by grid
/// position, analytic before sim. A policy that fails at a grid point yields a
/// failed row instead of aborting the sweep.
std::vector<ResultRow> run_sweep(const Scenario& scenario, SweepMode mode, unsigned threads = 1);

/// Master seed used for the simulation at grid index k. Shared by every
/// policy so schemes are compared on common random numbers.
std::uint64_t grid_seed(std::uint64_t master, std::size_t grid_index);

/// Throws std::domain_error if a successful row has a probability outside [0,1].
void check_row(const ResultRow& row);

void write_csv(std::ostream& out, std::span<const ResultRow> rows);
std::vector<ResultRow> read_csv(std::istream& in);

/// Writes p_drop.dat and utilization.dat: one gnuplot-style block per
/// (scheme, source) with columns `rate value ci`. Returns the written paths.
std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   std::span<const ResultRow> rows, SweepAxis axis);

const char* to_string(RowSource source);

}  // namespace cac
