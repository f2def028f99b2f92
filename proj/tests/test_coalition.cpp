#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mmtrain/coalition.hpp"

using namespace mmtrain;

namespace {

RateTable random_rates(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> r(1e8, 3e9);
  RateTable t;
  for (std::size_t i = 0; i < n; ++i) {
    t.bs.push_back(r(rng));
    t.mr.push_back(r(rng));
  }
  return t;
}

// Preference evaluated literally: four coalition sums from scratch.
bool prefers_switch_by_sums(FlowId id, const Partition& p, const RateTable& rates) {
  const Side here = p.side(id);
  auto fc = p.members(here);
  auto fo = p.members(other(here));
  const double stay = coalition_rate(fc, here, rates) + coalition_rate(fo, other(here), rates);
  std::erase(fc, id);
  fo.push_back(id);
  const double move = coalition_rate(fc, here, rates) + coalition_rate(fo, other(here), rates);
  return stay < move;
}

// Independent oracle: try every assignment, keep the best total.
double brute_best(const RateTable& rates) {
  const std::size_t n = rates.size();
  double best = 0.0;
  for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (m >> i & 1) ? rates.bs[i] : rates.mr[i];
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

TEST(Partition, FromSetsChecksDisjointAndTotal) {
  const std::vector<FlowId> bs{0, 2}, mr{1, 3};
  const auto p = Partition::from_sets(4, bs, mr);
  EXPECT_EQ(p.bs_coalition(), bs);
  EXPECT_EQ(p.mr_coalition(), mr);

  const std::vector<FlowId> dup{1, 2};
  EXPECT_THROW(Partition::from_sets(4, bs, dup), state_error);
  const std::vector<FlowId> partial{1};
  EXPECT_THROW(Partition::from_sets(4, bs, partial), state_error);
  const std::vector<FlowId> unknown{1, 3, 9};
  EXPECT_THROW(Partition::from_sets(4, bs, unknown), lookup_error);
}

TEST(Partition, MaskLayout) {
  const auto p = Partition::from_bs_mask(4, 0b0101);
  EXPECT_EQ(p.bs_coalition(), (std::vector<FlowId>{0, 2}));
  EXPECT_EQ(p.mr_coalition(), (std::vector<FlowId>{1, 3}));
}

TEST(CoalitionRate, EmptySingletonAndSum) {
  std::mt19937_64 rng(1);
  const auto rates = random_rates(rng, 8);
  EXPECT_EQ(coalition_rate({}, Side::bs, rates), 0.0);
  const std::vector<FlowId> one{3};
  EXPECT_EQ(coalition_rate(one, Side::mr, rates), rates.mr[3]);

  const std::vector<FlowId> five{0, 2, 4, 5, 7};
  double expect = 0.0;
  for (FlowId id : five) expect += rates.bs[id];
  EXPECT_DOUBLE_EQ(coalition_rate(five, Side::bs, rates), expect);

  const std::vector<FlowId> bad{2, 8};
  EXPECT_THROW(coalition_rate(bad, Side::bs, rates), lookup_error);
}

TEST(Preference, StrictImprovementOnly) {
  // stay total 5e9, switch total 6e9
  RateTable t{{2e9, 3e9}, {3e9, 1e9}};
  Partition p(2, Side::bs);
  EXPECT_TRUE(prefers_switch(0, p, t));
  EXPECT_FALSE(prefers_switch(1, p, t));

  RateTable tie{{2e9}, {2e9}};
  EXPECT_FALSE(prefers_switch(0, Partition(1, Side::bs), tie));
  EXPECT_FALSE(prefers_switch(0, Partition(1, Side::mr), tie));

  EXPECT_THROW(prefers_switch(5, p, t), state_error);
}

TEST(Preference, HigherRelayRatePrefersRelay) {
  RateTable t{{1e9}, {2.5e9}};
  EXPECT_TRUE(prefers_switch(0, Partition(1, Side::bs), t));
  EXPECT_FALSE(prefers_switch(0, Partition(1, Side::mr), t));
}

TEST(Preference, ReducedFormAgreesWithFourSums) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + rng() % 12;
    const auto rates = random_rates(rng, n);
    const auto p = random_partition(n, rng);
    for (std::size_t i = 0; i < n; ++i) {
      // Skip near-ties where summation order decides the literal form.
      if (std::abs(rates.bs[i] - rates.mr[i]) < 1e-6 * rates.bs[i]) continue;
      EXPECT_EQ(prefers_switch(i, p, rates), prefers_switch_by_sums(i, p, rates));
    }
  }
}

TEST(Game, SingleFlowMovesToBetterSide) {
  RateTable t{{2e9}, {1e9}};
  const auto res = form_coalitions(t, Partition(1, Side::mr));
  EXPECT_EQ(res.final_partition.side(0), Side::bs);
  EXPECT_EQ(res.switch_count, 1U);
  EXPECT_EQ(res.pass_count, 2U);
  EXPECT_EQ(res.sum_rate, 2e9);
}

TEST(Game, StableStartIsFixedPoint) {
  RateTable t{{2e9, 1e9, 3e9}, {1e9, 2e9, 0.5e9}};
  const auto start = Partition::from_bs_mask(3, 0b101);
  const auto res = form_coalitions(t, start);
  EXPECT_EQ(res.switch_count, 0U);
  EXPECT_EQ(res.pass_count, 1U);
  EXPECT_EQ(res.final_partition, start);
}

TEST(Game, RejectsBadVisitOrder) {
  RateTable t{{1e9, 2e9}, {2e9, 1e9}};
  const std::vector<FlowId> short_order{0};
  const std::vector<FlowId> repeated{0, 0};
  EXPECT_THROW(form_coalitions(t, Partition(2, Side::bs), short_order), state_error);
  EXPECT_THROW(form_coalitions(t, Partition(2, Side::bs), repeated), state_error);
  EXPECT_THROW(form_coalitions(t, Partition(3, Side::bs)), state_error);
}

TEST(Game, EmptyGame) {
  const auto res = form_coalitions(RateTable{}, Partition{});
  EXPECT_EQ(res.switch_count, 0U);
  EXPECT_TRUE(is_nash_stable(res.final_partition, RateTable{}));
}

// Termination bound, strictly increasing totals, stability, validity and
// oracle dominance over random instances and both visit orders.
TEST(GameProperty, ConvergesToStableNotAboveOptimum) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 400; ++k) {
    const std::size_t n = rng() % 9;
    const auto rates = random_rates(rng, n);
    const auto start = random_partition(n, rng);

    auto order = ascending_order(n);
    std::vector<std::vector<FlowId>> orders{order};
    std::shuffle(order.begin(), order.end(), rng);
    orders.push_back(order);

    const double optimum = brute_best(rates);
    for (const auto& ord : orders) {
      const auto res = form_coalitions(rates, start, ord);
      EXPECT_LE(res.switch_count, std::size_t{1} << n);
      EXPECT_EQ(res.rate_trajectory.size(), res.switch_count + 1);
      for (std::size_t s = 1; s < res.rate_trajectory.size(); ++s) {
        EXPECT_GT(res.rate_trajectory[s], res.rate_trajectory[s - 1]);
      }
      EXPECT_TRUE(is_nash_stable(res.final_partition, rates));
      EXPECT_EQ(res.final_partition.size(), n);
      EXPECT_EQ(res.final_partition.bs_coalition().size() + res.final_partition.mr_coalition().size(), n);
      EXPECT_LE(res.sum_rate, optimum * (1 + 1e-12));
      EXPECT_DOUBLE_EQ(res.sum_rate, total_rate(res.final_partition, rates));
    }
  }
}

TEST(Nash, DetectsProfitableDeviation) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 10;
    const auto rates = random_rates(rng, n);
    auto stable = form_coalitions(rates, random_partition(n, rng)).final_partition;
    ASSERT_TRUE(is_nash_stable(stable, rates));
    const FlowId victim = rng() % n;
    const double before = total_rate(stable, rates);
    stable.move(victim);
    if (total_rate(stable, rates) < before) {
      EXPECT_FALSE(is_nash_stable(stable, rates));
    }
  }
  EXPECT_TRUE(is_nash_stable(Partition{}, RateTable{}));
}

TEST(Exhaustive, SmallCases) {
  RateTable one{{2e9}, {1e9}};
  EXPECT_EQ(exhaustive_optimum(one).partition.side(0), Side::bs);

  RateTable two{{3e9, 4e9}, {1e9, 2e9}};
  const auto best = exhaustive_optimum(two);
  EXPECT_EQ(best.partition.bs_coalition(), (std::vector<FlowId>{0, 1}));
  EXPECT_DOUBLE_EQ(best.sum_rate, 7e9);

  // Ties resolve to the smallest BS mask: everything on the relay side.
  RateTable tie{{1e9, 1e9}, {1e9, 1e9}};
  EXPECT_EQ(exhaustive_optimum(tie).partition, Partition(2, Side::mr));
}

TEST(Exhaustive, MatchesBruteForceAndDominatesGame) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 8;
    const auto rates = random_rates(rng, n);
    const auto best = exhaustive_optimum(rates);
    EXPECT_DOUBLE_EQ(best.sum_rate, brute_best(rates));
    EXPECT_DOUBLE_EQ(best.sum_rate, total_rate(best.partition, rates));
    EXPECT_GE(best.sum_rate, form_coalitions(rates, random_partition(n, rng)).sum_rate);
  }
}

TEST(Exhaustive, RefusesAboveCap) {
  std::mt19937_64 rng(1);
  const auto rates = random_rates(rng, 21);
  try {
    exhaustive_optimum(rates);
    FAIL() << "expected refusal";
  } catch (const resource_cap_error& e) {
    EXPECT_EQ(e.cap(), 20U);
    EXPECT_NE(std::string(e.what()).find("20"), std::string::npos);
  }
  EXPECT_NO_THROW(exhaustive_optimum(random_rates(rng, 4), 4));
  EXPECT_THROW(exhaustive_optimum(random_rates(rng, 5), 4), resource_cap_error);
}

TEST(RandomPartition, DeterministicPerSeed) {
  std::mt19937_64 a(123), b(123);
  EXPECT_EQ(random_partition(40, a), random_partition(40, b));
}
