#include "doctest.h"

#include <numeric>
#include <random>

#include "cac/chain_analytic.hpp"
#include "cac/chain_oracle.hpp"
#include "test_support.hpp"

using namespace cac;
using cac::testing::cell;
using cac::testing::single_class;
using cac::testing::table1_mix;

namespace {

const SchemePolicy kAllPolicies[] = {SchemePolicy::proposed(), SchemePolicy::non_prioritized(),
                                     SchemePolicy::hard(), SchemePolicy::guard(0.05)};

MixAggregates agg_of(double mean, double dh, double dn = 0.0, double g = 0.0) {
  return MixAggregates{mean, dh, dn, g};
}

}  // namespace

TEST_CASE("hard capacity") {
  CHECK(hard_capacity(agg_of(100, 0), cell(1000, 0, 0)) == 10);
  CHECK(hard_capacity(aggregates(table1_mix()), cell(1000, 0, 0)) == 15);
  CHECK(hard_capacity(aggregates(table1_mix()), cell(5000, 0, 0)) == 75);
  CHECK(hard_capacity(agg_of(100, 0), cell(99, 0, 0)) == 0);
}

TEST_CASE("extra handover states use the literal floor of the quotient") {
  CHECK(extra_states_handover(aggregates(single_class(100, 0.2, 0.5)), cell(1000, 0, 0)) == 10);
  CHECK(extra_states_handover(aggregates(single_class(100, 0.0, 0.0)), cell(1000, 0, 0)) == 0);
  CHECK(extra_states_handover(aggregates(single_class(100, 0.2, 0.9)), cell(1000, 0, 0)) == 90);
  CHECK(extra_states_handover(aggregates(table1_mix()), cell(5000, 0, 0)) == 39);
}

TEST_CASE("extra new-call states") {
  CHECK(extra_states_new(aggregates(single_class(100, 0.2, 0.5)), cell(1000, 0, 0)) == 2);
  const auto symmetric = aggregates(single_class(100, 0.4, 0.4));
  CHECK(extra_states_new(symmetric, cell(1000, 0, 0)) == extra_states_handover(symmetric, cell(1000, 0, 0)));
  CHECK(extra_states_new(aggregates(single_class(100, 0.0, 0.5)), cell(1000, 0, 0)) == 0);
  CHECK(extra_states_new(aggregates(table1_mix()), cell(5000, 0, 0)) == 12);
}

TEST_CASE("degradation level") {
  const auto agg = aggregates(single_class(100, 0.2, 0.5));
  const auto c = cell(1000, 0, 0);
  for (int i = 0; i <= 10; ++i) CHECK(degradation_level(i, agg, c) == 0.0);
  CHECK(degradation_level(20, agg, c) == doctest::Approx(1.0));
  CHECK(degradation_level(12, agg, c) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(degradation_level(11, aggregates(single_class(100, 0, 0)), c), ChainError);
}

TEST_CASE("release rate") {
  const auto c = cell(1000, 0, 0);
  const auto agg = aggregates(single_class(100, 0.2, 0.5));
  for (int i = 1; i <= 10; ++i) CHECK(release_rate(i, agg, c) == doctest::Approx(0.0125).epsilon(1e-14));
  CHECK(release_rate(20, agg, c) == doctest::Approx(1.0 / 240 + 0.5 / 120).epsilon(1e-14));
  CHECK(release_rate(20, agg, c) == doctest::Approx(0.008333).epsilon(1e-4));
  const auto rigid = aggregates(single_class(100, 0, 0));
  for (int i = 1; i <= 10; ++i) CHECK(release_rate(i, rigid, c) == doctest::Approx(0.0125));
}

TEST_CASE("policy names round-trip") {
  for (const auto& p : kAllPolicies) CHECK(SchemePolicy::parse(p.name()) == p);
  CHECK(SchemePolicy::guard(0.05).name() == "guard:0.05");
  CHECK_FALSE(SchemePolicy::proposed().guard_fraction().has_value());
  CHECK(SchemePolicy::guard(0.05).guard_fraction() == 0.05);
  CHECK_THROWS(SchemePolicy::parse("guard:x"));
  CHECK_THROWS(SchemePolicy::parse("guard:1.5"));
  CHECK_THROWS(SchemePolicy::parse("greedy"));
}

TEST_CASE("build_chain structure for the single-class example") {
  const auto mix = single_class(100, 0.2, 0.5);
  const auto c = cell(1000, 0.0625 * 2 / 3, 0.0625 / 3);

  SUBCASE("proposed") {
    const auto chain = build_chain(mix, c, SchemePolicy::proposed());
    CHECK(chain.n_hard == 10);
    CHECK(chain.extra_new == 2);
    CHECK(chain.extra_handover == 10);
    CHECK(chain.max_state == 20);
    CHECK(chain.new_cutoff == 12);
    REQUIRE(chain.birth_rates.size() == 20);
    REQUIRE(chain.death_rates.size() == 20);
    REQUIRE(chain.stationary.size() == 21);
    CHECK(chain.birth_rates[11] == doctest::Approx(0.0625));
    CHECK(chain.birth_rates[12] == doctest::Approx(0.0625 / 3));
    CHECK(chain.death_rates[0] == doctest::Approx(0.0125));
    CHECK(chain.death_rates[19] == doctest::Approx(20 * (1.0 / 240 + 0.5 / 120)));
  }
  SUBCASE("non-prioritized admits new calls up to the top") {
    const auto chain = build_chain(mix, c, SchemePolicy::non_prioritized());
    CHECK(chain.extra_new == 10);
    CHECK(chain.new_cutoff == 20);
    CHECK(blocking_probability(chain) == dropping_probability(chain));
  }
  SUBCASE("hard schemes stop at N") {
    const auto hard = build_chain(mix, c, SchemePolicy::hard());
    CHECK(hard.max_state == 10);
    CHECK(hard.new_cutoff == 10);
    const auto guard = build_chain(mix, c, SchemePolicy::guard(0.05));
    CHECK(guard.max_state == 10);
    CHECK(guard.new_cutoff == 9);  // ceil(0.05 * 1000 / 100) = 1 reserved slot
  }
}

TEST_CASE("single-class example matches the oracle and exact rational values") {
  const auto mix = single_class(100, 0.2, 0.5);
  const auto c = cell(1000, 0.0625 * 2 / 3, 0.0625 / 3);
  const auto chain = build_chain(mix, c, SchemePolicy::proposed());
  const auto expected = oracle::solve_stationary({chain.birth_rates, chain.death_rates});
  CHECK(oracle::max_relative_error(chain.stationary, expected) <= 1e-10);
  // Exact rational evaluation of the product form (Python fractions).
  CHECK(blocking_probability(chain) == doctest::Approx(0.00484314047858246).epsilon(1e-12));
  CHECK(dropping_probability(chain) == doctest::Approx(5.18150937369784e-10).epsilon(1e-12));
  CHECK(dropping_probability(chain) < blocking_probability(chain));
}

TEST_CASE("empty system") {
  for (const auto& p : kAllPolicies) {
    const auto chain = build_chain(table1_mix(), cell(5000, 0, 0), p);
    CHECK(chain.stationary[0] == 1.0);
    for (std::size_t i = 1; i < chain.stationary.size(); ++i) CHECK(chain.stationary[i] == 0.0);
    CHECK(blocking_probability(chain) == 0.0);
    CHECK(utilization(chain, aggregates(table1_mix()), cell(5000, 0, 0)) == 0.0);
  }
}

TEST_CASE("gamma = 0 collapses every scheme to Erlang-B") {
  const auto mix = single_class(100, 0, 0);
  const auto c = cell(1000, 0.0625 * 2 / 3, 0.0625 / 3);  // 5 Erlangs on N = 10
  const auto proposed = build_chain(mix, c, SchemePolicy::proposed());
  const auto hard = build_chain(mix, c, SchemePolicy::hard());
  CHECK(proposed.extra_new == 0);
  CHECK(proposed.extra_handover == 0);
  CHECK(proposed.stationary == hard.stationary);
  for (const auto& p : {SchemePolicy::proposed(), SchemePolicy::non_prioritized(), SchemePolicy::hard()}) {
    const auto chain = build_chain(mix, c, p);
    CHECK(std::abs(blocking_probability(chain) - 0.018385) <= 1e-6);
    CHECK(blocking_probability(chain) == doctest::Approx(oracle::erlang_b(10, 5.0)).epsilon(1e-12));
    CHECK(dropping_probability(chain) == blocking_probability(chain));
  }
}

TEST_CASE("build_chain errors") {
  CHECK_NOTHROW(build_chain(single_class(100, 0, 0), cell(1000, 0.1, 0.1), SchemePolicy::guard(0.95)));
  CHECK_THROWS_AS(build_chain(single_class(100, 0, 0), cell(1050, 0.1, 0.1), SchemePolicy::guard(0.99)),
                  ChainError);
  CHECK_THROWS_AS(build_chain(single_class(100, 0, 0), cell(50, 0.1, 0.1), SchemePolicy::proposed()), ChainError);
  CHECK_THROWS_AS(build_chain(TrafficMix{{{"a", 0.5, 100, 0, 0}}}, cell(1000, 0.1, 0.1), SchemePolicy::hard()),
                  ValidationError);
}

TEST_CASE("utilization") {
  const auto mix = table1_mix();
  const auto agg = aggregates(mix);
  SUBCASE("vanishing load") {
    const auto c = cell(5000, 1e-9, 5e-10);
    for (const auto& p : kAllPolicies) CHECK(utilization(build_chain(mix, c, p), agg, c) < 1e-6);
  }
  SUBCASE("saturating load fills the cell under adaptive schemes") {
    const auto c = cell(5000, 200.0, 100.0);
    CHECK(utilization(build_chain(mix, c, SchemePolicy::proposed()), agg, c) > 0.999);
    CHECK(utilization(build_chain(mix, c, SchemePolicy::non_prioritized()), agg, c) > 0.999);
  }
  SUBCASE("a guard band costs utilization") {
    const auto c = cell(5000, 0.6, 0.3);
    const double hard = utilization(build_chain(mix, c, SchemePolicy::hard()), agg, c);
    const double guard = utilization(build_chain(mix, c, SchemePolicy::guard(0.05)), agg, c);
    CHECK(guard < hard);
  }
}

TEST_CASE("property: closed form equals the oracle on random configs") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 250; ++trial) {
    const auto mix = cac::testing::random_mix(rng);
    const auto agg = aggregates(mix);
    const double capacity = agg.mean_demand * (2.0 + 60.0 * unit(rng));
    const double saturation = std::floor(capacity / agg.mean_demand) * 0.0125;
    const double load = saturation * (0.1 + 2.9 * unit(rng));
    const double split = unit(rng);
    const auto c = cell(capacity, load * split, load * (1 - split));
    const auto policy = cac::testing::random_policy(rng);
    ChainModel chain;
    try {
      chain = build_chain(mix, c, policy);
    } catch (const ChainError&) {
      continue;  // guard band larger than N
    }
    const auto expected = oracle::solve_stationary({chain.birth_rates, chain.death_rates});
    CHECK(oracle::max_relative_error(chain.stationary, expected) <= 1e-9);
    CHECK(std::accumulate(chain.stationary.begin(), chain.stationary.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    for (double p : chain.stationary) CHECK(p >= 0.0);
    CHECK(0 <= chain.extra_new);
    CHECK(chain.extra_new <= chain.extra_handover);
    for (double d : chain.death_rates) CHECK(d > 0.0);
    ++checked;
  }
  CHECK(checked >= 200);
}

TEST_CASE("property: theta at the top state never exceeds 1") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto mix = cac::testing::random_mix(rng);
    const auto agg = aggregates(mix);
    const auto c = cell(agg.mean_demand * (1.0 + 100.0 * unit(rng)), 0, 0);
    const int top = hard_capacity(agg, c) + extra_states_handover(agg, c);
    if (agg.degradable_handover > 0.0) {
      const double raw = (top * agg.mean_demand - c.capacity) / (top * agg.degradable_handover);
      CHECK(raw <= 1.0 + 1e-12);
    }
  }
  // C / mean and C / (mean - D_h) both integral: the top state is fully degraded.
  const auto agg = aggregates(single_class(100, 0.2, 0.5));
  CHECK(degradation_level(20, agg, cell(1000, 0, 0)) == 1.0);
  const auto agg2 = aggregates(single_class(80, 0.1, 0.75));
  CHECK(degradation_level(50 + 150, agg2, cell(4000, 0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("property: blocking and dropping are monotone in both arrival rates") {
  const auto mix = table1_mix();
  for (const auto& policy : kAllPolicies) {
    for (double fixed : {0.05, 0.3, 0.8}) {
      double prev_b = 0.0, prev_d = 0.0;
      for (double ln = 0.0; ln <= 2.0; ln += 0.05) {
        const auto chain = build_chain(mix, cell(5000, ln, fixed), policy);
        const double b = blocking_probability(chain), d = dropping_probability(chain);
        CHECK(b >= prev_b * (1 - 1e-12));
        CHECK(d >= prev_d * (1 - 1e-12));
        prev_b = b;
        prev_d = d;
      }
      prev_b = prev_d = 0.0;
      for (double lh = 0.0; lh <= 2.0; lh += 0.05) {
        const auto chain = build_chain(mix, cell(5000, fixed, lh), policy);
        const double b = blocking_probability(chain), d = dropping_probability(chain);
        CHECK(b >= prev_b * (1 - 1e-12));
        CHECK(d >= prev_d * (1 - 1e-12));
        prev_b = b;
        prev_d = d;
      }
    }
  }
}

TEST_CASE("property: proposed trades blocking for dropping against non-prioritized") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto mix = cac::testing::random_mix(rng);
    const auto agg = aggregates(mix);
    const double capacity = agg.mean_demand * (5.0 + 50.0 * unit(rng));
    const double load = std::floor(capacity / agg.mean_demand) * 0.0125 * (0.3 + 2.0 * unit(rng));
    const auto c = cell(capacity, load * (0.2 + 0.6 * unit(rng)), load * 0.3);
    const auto proposed = build_chain(mix, c, SchemePolicy::proposed());
    if (proposed.extra_new >= proposed.extra_handover) continue;
    const auto flat = build_chain(mix, c, SchemePolicy::non_prioritized());
    CHECK(dropping_probability(proposed) < dropping_probability(flat));
    CHECK(blocking_probability(proposed) >= blocking_probability(flat));
    CHECK(dropping_probability(proposed) < blocking_probability(proposed));
    ++checked;
  }
  CHECK(checked > 100);
}
