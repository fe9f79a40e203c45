#pragma once

#include <span>
#include <vector>

// Reference solvers used to check the closed-form chain. Nothing in here may
// call into chain_analytic; the two must stay independent routes.

namespace cac::oracle {

/// Generic birth-death chain on states 0..K.
/// birth[i]: rate i -> i+1. death[i]: rate i+1 -> i.
struct BirthDeathSpec {
  std::vector<double> birth;
  std::vector<double> death;
};

/// Stationary distribution via the detailed-balance recursion
/// P(i+1) = P(i) * birth[i] / death[i], accumulated in long double with
/// periodic rescaling. Throws std::invalid_argument on mismatched lengths or
/// a non-positive death rate.
std::vector<double> solve_stationary(const BirthDeathSpec& spec);

/// Erlang-B loss probability, B(n) = A B(n-1) / (n + A B(n-1)), B(0) = 1.
double erlang_b(int servers, double offered_load);

/// Largest per-state relative error |a - b| / |b| (absolute error where b
/// underflows). Used by the equivalence checks.
double max_relative_error(std::span<const double> actual, std::span<const double> expected);

}  // namespace cac::oracle
