#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "mmtrain/scheduler.hpp"

using namespace mmtrain;

namespace {

std::vector<SlotDemand> demands_from_slots(const std::vector<SlotCount>& need, SlotCount m) {
  std::vector<SlotDemand> d;
  for (std::size_t i = 0; i < need.size(); ++i) {
    d.push_back(slot_demand(static_cast<double>(need[i]), static_cast<double>(m), m, i));
  }
  return d;
}

std::vector<SlotDemand> random_demands(std::mt19937_64& rng, std::size_t n, SlotCount m) {
  std::uniform_real_distribution<double> q(0.0, 6e8), r(1e8, 3e9);
  std::vector<SlotDemand> d;
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = rng() % 10 == 0 ? 0.0 : r(rng);
    const double qos = rng() % 10 == 0 ? 0.0 : q(rng);
    d.push_back(slot_demand(qos, rate, m, i));
  }
  return d;
}

// Sort the raw slot counts and add them up; an exchange argument makes the
// smallest-first prefix the largest feasible set.
std::size_t max_count_by_sorting(std::vector<SlotDemand> d, SlotCount m) {
  std::vector<SlotCount> need;
  for (const auto& x : d)
    if (x.required_slots) need.push_back(*x.required_slots);
  std::sort(need.begin(), need.end());
  SlotCount used = 0;
  std::size_t k = 0;
  while (k < need.size() && used + need[k] <= m) used += need[k++];
  return k;
}

}  // namespace

TEST(SlotDemand, Basics) {
  EXPECT_EQ(*slot_demand(5e8, 1e9, 10).required_slots, 5);
  EXPECT_EQ(*slot_demand(0.0, 1e9, 10).required_slots, 0);
  EXPECT_EQ(*slot_demand(0.0, 0.0, 10).required_slots, 0);
  EXPECT_FALSE(slot_demand(1.0, 0.0, 10).schedulable());
  EXPECT_THROW(slot_demand(1.0, 1.0, 0), domain_error);
  EXPECT_THROW(slot_demand(-1.0, 1.0, 10), domain_error);
}

TEST(SlotDemand, CeilingOfFractionalDemand) {
  const double rate = 1e9;
  const auto d = slot_demand(0.35 * rate, rate, 10);
  EXPECT_EQ(*d.required_slots, 4);
  EXPECT_TRUE(satisfied(throughput(rate, 4, 10), 0.35 * rate));
  EXPECT_FALSE(satisfied(throughput(rate, 3, 10), 0.35 * rate));
}

TEST(SlotDemand, MinimalAndSufficientProperty) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> q(1.0, 1e9), r(1.0, 3e9);
  for (int k = 0; k < 5000; ++k) {
    const SlotCount m = 1 + static_cast<SlotCount>(rng() % 5000);
    const double qos = q(rng), rate = r(rng);
    const auto d = slot_demand(qos, rate, m);
    ASSERT_TRUE(d.required_slots);
    const SlotCount delta = *d.required_slots;
    EXPECT_TRUE(satisfied(throughput(rate, delta, m), qos));
    EXPECT_FALSE(satisfied(throughput(rate, delta - 1, m), qos));
  }
}

TEST(Greedy, FiveFlowGoldenCase) {
  // A..E need 8, 3, 1, 2, 4 slots of M = 10.
  const auto d = demands_from_slots({8, 3, 1, 2, 4}, 10);
  const auto s = schedule_greedy(d, 10);
  EXPECT_EQ(s.satisfied_count(), 4U);
  EXPECT_FALSE(s.satisfied_flags.at(0));
  for (FlowId id : {1, 2, 3, 4}) EXPECT_TRUE(s.satisfied_flags.at(id));
  EXPECT_EQ(s.total_slots_used, 10);
  // Layout C, D, B, E from slot 0.
  const std::vector<Pairing> expect{{2, 0, 1}, {3, 1, 2}, {1, 3, 3}, {4, 6, 4}};
  EXPECT_EQ(s.pairings, expect);
  EXPECT_TRUE(schedule_violations(s).empty());
  EXPECT_EQ(schedule_oracle(d, 10), 4U);
}

TEST(Greedy, UnsortedGoldenCaseServesOnlyFirstFlow) {
  const auto d = demands_from_slots({8, 3, 1, 2, 4}, 10);
  const auto s = schedule_greedy(d, 10, {.sort_by_demand = false});
  EXPECT_EQ(s.satisfied_count(), 1U);
  EXPECT_TRUE(s.satisfied_flags.at(0));
  EXPECT_EQ(s.total_slots_used, 8);
}

TEST(Greedy, ZeroDemandsAllSatisfied) {
  const auto d = demands_from_slots({0, 0, 0}, 10);
  const auto s = schedule_greedy(d, 10);
  EXPECT_EQ(s.satisfied_count(), 3U);
  EXPECT_EQ(s.total_slots_used, 0);
  EXPECT_TRUE(s.pairings.empty());
}

TEST(Greedy, TieBreakByFlowId) {
  const auto d = demands_from_slots({2, 2, 2}, 4);
  const auto s = schedule_greedy(d, 4);
  EXPECT_TRUE(s.satisfied_flags.at(0));
  EXPECT_TRUE(s.satisfied_flags.at(1));
  EXPECT_FALSE(s.satisfied_flags.at(2));
}

TEST(Greedy, UnschedulableFlowsNeverGetSlots) {
  std::vector<SlotDemand> d{slot_demand(1e8, 0.0, 10, 0), slot_demand(1e8, 1e9, 10, 1)};
  const auto s = schedule_greedy(d, 10);
  EXPECT_FALSE(s.satisfied_flags.at(0));
  EXPECT_TRUE(s.satisfied_flags.at(1));
  EXPECT_EQ(s.slots_of(0), 0);
  EXPECT_EQ(schedule_oracle(d, 10), 1U);
}

TEST(Greedy, TopUpGivesLeftoverToNextFlow) {
  const auto d = demands_from_slots({8, 3, 1, 2, 5}, 10);
  const auto s = schedule_greedy(d, 10, {.top_up = true});
  EXPECT_EQ(s.satisfied_count(), 3U);  // C, D, B use 6 slots
  EXPECT_EQ(s.slots_of(4), 4);        // E gets the 4 leftover slots but needs 5
  EXPECT_FALSE(s.satisfied_flags.at(4));
  EXPECT_EQ(s.total_slots_used, 10);
  EXPECT_TRUE(schedule_violations(s).empty());
}

TEST(Greedy, OversizedDemandsLeaveFrameEmpty) {
  const auto d = demands_from_slots({11, 12, 30}, 10);
  EXPECT_EQ(schedule_greedy(d, 10).satisfied_count(), 0U);
  EXPECT_EQ(schedule_oracle(d, 10), 0U);
}

TEST(Throughput, AchievedAndIndicator) {
  const auto d = demands_from_slots({8, 3, 1, 2, 4}, 10);
  const auto s = schedule_greedy(d, 10);
  const double rate_c = 10.0;
  EXPECT_DOUBLE_EQ(achieved_throughput(s, 2, rate_c), rate_c / 10.0);
  EXPECT_GE(achieved_throughput(s, 2, rate_c), d[2].qos);
  EXPECT_EQ(achieved_throughput(s, 0, 10.0), 0.0);
  EXPECT_THROW(achieved_throughput(s, 99, 1.0), lookup_error);

  Schedule full;
  full.slots_per_frame = 10;
  full.pairings = {{0, 0, 10}};
  full.satisfied_flags[0] = true;
  EXPECT_DOUBLE_EQ(achieved_throughput(full, 0, 3e9), 3e9);

  EXPECT_TRUE(satisfied(5.0, 5.0));
  EXPECT_FALSE(satisfied(0.0, 1.0));
  EXPECT_TRUE(satisfied(1.0, 0.0));
}

TEST(Objective, BlockageScaling) {
  const auto s = schedule_greedy(demands_from_slots({8, 3, 1, 2, 4}, 10), 10);
  EXPECT_DOUBLE_EQ(objective_value(s, 0.0), 4.0);
  EXPECT_DOUBLE_EQ(objective_value(s, 1.0), 0.0);
  EXPECT_NEAR(objective_value(s, 0.1), 3.6, 1e-12);
  EXPECT_THROW(objective_value(s, -0.01), domain_error);
  EXPECT_THROW(objective_value(s, 1.01), domain_error);
}

TEST(Oracle, RefusesAboveCap) {
  const auto d = demands_from_slots(std::vector<SlotCount>(21, 1), 10);
  EXPECT_THROW(schedule_oracle(d, 10), resource_cap_error);
}

TEST(GreedyProperty, ExactAgainstBruteForce) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 600; ++k) {
    const std::size_t n = rng() % 17;
    const SlotCount m = 1 + static_cast<SlotCount>(rng() % 40);
    const auto d = random_demands(rng, n, m);
    const auto s = schedule_greedy(d, m);
    EXPECT_EQ(s.satisfied_count(), schedule_oracle(d, m));
    EXPECT_EQ(s.satisfied_count(), max_count_by_sorting(d, m));
  }
}

TEST(GreedyProperty, FeasibleAndSound) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 400; ++k) {
    const std::size_t n = 1 + rng() % 30;
    const SlotCount m = 1 + static_cast<SlotCount>(rng() % 3000);
    const auto d = random_demands(rng, n, m);
    const auto s = schedule_greedy(d, m, {.top_up = rng() % 2 == 0});
    EXPECT_TRUE(schedule_violations(s).empty());
    EXPECT_LE(s.total_slots_used, m);
    for (const auto& x : d) {
      const bool ok = satisfied(achieved_throughput(s, x.flow_id, x.rate), x.qos);
      EXPECT_EQ(s.satisfied_flags.at(x.flow_id), ok) << x.flow_id;
    }
  }
}

TEST(GreedyProperty, MutationsAreRejected) {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 2 + rng() % 10;
    const SlotCount m = 20 + static_cast<SlotCount>(rng() % 100);
    auto s = schedule_greedy(random_demands(rng, n, m), m);
    if (s.pairings.size() < 2) continue;
    ++checked;
    auto dup = s;
    dup.pairings.push_back(dup.pairings.front());
    dup.total_slots_used += dup.pairings.front().slot_count;
    EXPECT_FALSE(schedule_violations(dup).empty());

    auto overlap = s;
    overlap.pairings[1].start_slot = overlap.pairings[0].start_slot;
    EXPECT_FALSE(schedule_violations(overlap).empty());

    auto overrun = s;
    overrun.pairings.back().slot_count += m;
    overrun.total_slots_used += m;
    EXPECT_FALSE(schedule_violations(overrun).empty());

    auto miscount = s;
    miscount.total_slots_used += 1;
    EXPECT_FALSE(schedule_violations(miscount).empty());
  }
  EXPECT_GT(checked, 50);
}

TEST(GreedyProperty, Monotonicity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> q(1e6, 5e8), r(1e8, 3e9), grow(1.0, 3.0);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<double> qos(n), rate(n);
    for (std::size_t i = 0; i < n; ++i) {
      qos[i] = q(rng);
      rate[i] = r(rng);
    }
    auto count = [&](SlotCount m, const std::vector<double>& qv) {
      std::vector<SlotDemand> d;
      for (std::size_t i = 0; i < n; ++i) d.push_back(slot_demand(qv[i], rate[i], m, i));
      return schedule_greedy(d, m).satisfied_count();
    };
    const SlotCount m = 1 + static_cast<SlotCount>(rng() % 200);
    // ceil(x*M)/M is not monotone in M, but a feasible set stays feasible at any multiple of M.
    EXPECT_LE(count(m, qos), count(m * (2 + static_cast<SlotCount>(rng() % 3)), qos));
    auto raised = qos;
    raised[rng() % n] *= grow(rng);
    EXPECT_GE(count(m, qos), count(m, raised));
  }
}

TEST(ScheduleJson, FieldsAndNullStart) {
  const auto s = schedule_greedy(demands_from_slots({8, 3, 1, 2, 4}, 10), 10);
  const auto j = to_json(s);
  EXPECT_EQ(j.at("slots_per_frame"), 10);
  EXPECT_EQ(j.at("satisfied_count"), 4);
  ASSERT_EQ(j.at("flows").size(), 5U);
  const auto& a = j.at("flows")[0];
  EXPECT_EQ(a.at("flow_id"), 0);
  EXPECT_TRUE(a.at("start_slot").is_null());
  EXPECT_EQ(a.at("slot_count"), 0);
  EXPECT_EQ(a.at("satisfied"), false);
  const auto& c = j.at("flows")[2];
  EXPECT_EQ(c.at("start_slot"), 0);
  EXPECT_EQ(c.at("slot_count"), 1);
  EXPECT_EQ(c.at("satisfied"), true);
}
