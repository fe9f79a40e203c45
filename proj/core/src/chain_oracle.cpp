#include "cac/chain_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cac::oracle {

std::vector<double> solve_stationary(const BirthDeathSpec& spec) {
  if (spec.birth.size() != spec.death.size())
    throw std::invalid_argument("birth and death rate lists differ in length");
  for (double d : spec.death)
    if (!(d > 0.0)) throw std::invalid_argument("death rates must be strictly positive");

  const std::size_t k = spec.birth.size();
  std::vector<long double> p(k + 1, 0.0L);
  p[0] = 1.0L;
  constexpr long double kRescaleAbove = 1e300L;
  for (std::size_t i = 0; i < k; ++i) {
    p[i + 1] = p[i] * static_cast<long double>(spec.birth[i]) / static_cast<long double>(spec.death[i]);
    if (p[i + 1] > kRescaleAbove) {
      for (std::size_t j = 0; j <= i + 1; ++j) p[j] /= kRescaleAbove;
    }
  }
  long double total = 0.0L;
  for (long double v : p) total += v;
  std::vector<double> out(k + 1);
  for (std::size_t i = 0; i <= k; ++i) out[i] = static_cast<double>(p[i] / total);
  return out;
}

double erlang_b(int servers, double offered_load) {
  if (servers < 0 || !(offered_load >= 0.0))
    throw std::invalid_argument("erlang_b needs servers >= 0 and offered_load >= 0");
  double b = 1.0;
  for (int n = 1; n <= servers; ++n) b = offered_load * b / (n + offered_load * b);
  return b;
}

double max_relative_error(std::span<const double> actual, std::span<const double> expected) {
  if (actual.size() != expected.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double diff = std::abs(actual[i] - expected[i]);
    const double scale = std::abs(expected[i]);
    const double err = scale > std::numeric_limits<double>::min() ? diff / scale : diff;
    if (std::isnan(err)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace cac::oracle
