#ifndef MMTRAIN_COALITION_HPP
#define MMTRAIN_COALITION_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mmtrain/errors.hpp"

// Two-coalition formation game over downlink flows. Coalition F1 holds the
// flows served directly by the base station, F2 those relayed through the
// mobile relay. Players switch sides under the utilitarian preference: a move
// happens only if it strictly raises R(F1) + R(F2).
namespace mmtrain {

using FlowId = std::size_t;

enum class Side : std::uint8_t { bs, mr };

inline Side other(Side s) { return s == Side::bs ? Side::mr : Side::bs; }

inline const char* to_string(Side s) { return s == Side::bs ? "BS" : "MR"; }

/// Per-flow achievable rates (bits/s) on each side. Coalitions share their
/// bandwidth in time, so a flow's rate does not depend on who else joined.
struct RateTable {
  std::vector<double> bs;
  std::vector<double> mr;

  std::size_t size() const noexcept { return bs.size(); }

  double rate(FlowId id, Side s) const {
    if (id >= bs.size()) throw lookup_error("unknown flow id " + std::to_string(id));
    return s == Side::bs ? bs[id] : mr[id];
  }
};

/// Assignment of every flow to exactly one coalition. Totality and
/// disjointness hold by construction.
class Partition {
public:
  Partition() = default;
  Partition(std::size_t n, Side initial) : side_(n, initial) {}
  explicit Partition(std::vector<Side> sides) : side_(std::move(sides)) {}

  /// Builds from explicit member sets, checking that they are disjoint and
  /// cover 0..n-1.
  static Partition from_sets(std::size_t n, std::span<const FlowId> bs_members, std::span<const FlowId> mr_members) {
    std::vector<int> seen(n, 0);
    std::vector<Side> sides(n, Side::bs);
    auto mark = [&](std::span<const FlowId> ids, Side s) {
      for (FlowId id : ids) {
        if (id >= n) throw lookup_error("unknown flow id " + std::to_string(id));
        if (seen[id]++) throw state_error("flow " + std::to_string(id) + " appears in more than one coalition slot");
        sides[id] = s;
      }
    };
    mark(bs_members, Side::bs);
    mark(mr_members, Side::mr);
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) throw state_error("flow " + std::to_string(i) + " is not associated with any coalition");
    }
    return Partition(std::move(sides));
  }

  /// Bit i set means flow i sits in the BS coalition.
  static Partition from_bs_mask(std::size_t n, std::uint64_t mask) {
    std::vector<Side> sides(n);
    for (std::size_t i = 0; i < n; ++i) sides[i] = (mask >> i) & 1U ? Side::bs : Side::mr;
    return Partition(std::move(sides));
  }

  std::size_t size() const noexcept { return side_.size(); }

  Side side(FlowId id) const {
    if (id >= side_.size()) throw state_error("flow " + std::to_string(id) + " is absent from the partition");
    return side_[id];
  }

  void move(FlowId id) {
    if (id >= side_.size()) throw state_error("flow " + std::to_string(id) + " is absent from the partition");
    side_[id] = other(side_[id]);
  }

  std::vector<FlowId> members(Side s) const {
    std::vector<FlowId> out;
    for (std::size_t i = 0; i < side_.size(); ++i)
      if (side_[i] == s) out.push_back(i);
    return out;
  }
  std::vector<FlowId> bs_coalition() const { return members(Side::bs); }
  std::vector<FlowId> mr_coalition() const { return members(Side::mr); }

  std::span<const Side> sides() const noexcept { return side_; }

  friend bool operator==(const Partition&, const Partition&) = default;

private:
  std::vector<Side> side_;
};

/// Sum of member rates on one side. Empty coalition contributes 0.
inline double coalition_rate(std::span<const FlowId> members, Side side, const RateTable& rates) {
  double sum = 0.0;
  for (FlowId id : members) sum += rates.rate(id, side);
  return sum;
}

/// R(F1) + R(F2), summed in flow-id order so equal partitions give bit-equal totals.
inline double total_rate(const Partition& p, const RateTable& rates) {
  if (p.size() != rates.size()) throw state_error("partition and rate table disagree on flow count");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += rates.rate(i, p.sides()[i]);
  return sum;
}

/// True iff moving `id` to the other coalition strictly increases the total.
///
/// R(Fc) + R(Fc') < R(Fc \ i) + R(Fc' u i) reduces to r_other(i) > r_here(i)
/// because every other member's term appears on both sides unchanged. The
/// reduced form compares two stored numbers, so exact ties never switch.
inline bool prefers_switch(FlowId id, const Partition& p, const RateTable& rates) {
  const Side here = p.side(id);
  return rates.rate(id, other(here)) > rates.rate(id, here);
}

inline bool is_nash_stable(const Partition& p, const RateTable& rates) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (prefers_switch(i, p, rates)) return false;
  return true;
}

struct CoalitionGameResult {
  Partition final_partition;
  std::size_t switch_count = 0;
  std::size_t pass_count = 0;
  double sum_rate = 0.0;
  /// Total rate before any switch followed by the total after each switch.
  std::vector<double> rate_trajectory;
};

inline std::vector<FlowId> ascending_order(std::size_t n) {
  std::vector<FlowId> order(n);
  std::iota(order.begin(), order.end(), FlowId{0});
  return order;
}

/// Switch dynamics: sweep flows in `visit_order`, move any flow that strictly
/// prefers the other coalition, stop after a pass with no switch.
inline CoalitionGameResult form_coalitions(const RateTable& rates, Partition initial,
                                           std::span<const FlowId> visit_order) {
  const std::size_t n = rates.size();
  if (initial.size() != n) throw state_error("initial partition size does not match the flow count");
  {
    std::vector<char> seen(n, 0);
    bool ok = visit_order.size() == n;
    for (FlowId id : visit_order) {
      if (!ok) break;
      ok = id < n && !seen[id];
      if (ok) seen[id] = 1;
    }
    if (!ok) throw state_error("visit order must be a permutation of all flow ids");
  }

  CoalitionGameResult res{std::move(initial), 0, 0, 0.0, {}};
  double total = total_rate(res.final_partition, rates);
  res.rate_trajectory.push_back(total);

  bool switched = true;
  while (switched) {
    switched = false;
    ++res.pass_count;
    for (FlowId id : visit_order) {
      if (prefers_switch(id, res.final_partition, rates)) {
        res.final_partition.move(id);
        ++res.switch_count;
        switched = true;
        total = total_rate(res.final_partition, rates);
        res.rate_trajectory.push_back(total);
      }
    }
  }
  res.sum_rate = total;
  return res;
}

inline CoalitionGameResult form_coalitions(const RateTable& rates, Partition initial) {
  const auto order = ascending_order(rates.size());
  return form_coalitions(rates, std::move(initial), order);
}

/// Fair coin per flow. Draws one 64-bit word per flow from the engine.
template <class Engine>
Partition random_partition(std::size_t n, Engine& rng) {
  std::vector<Side> sides(n);
  for (auto& s : sides) s = (rng() >> 63) ? Side::bs : Side::mr;
  return Partition(std::move(sides));
}

struct OptimumResult {
  Partition partition;
  double sum_rate = 0.0;
};

inline constexpr std::size_t default_enumeration_cap = 20;

/// Enumerates all 2^N assignments. Ties go to the numerically smallest
/// BS-membership mask.
inline OptimumResult exhaustive_optimum(const RateTable& rates, std::size_t cap = default_enumeration_cap) {
  const std::size_t n = rates.size();
  if (cap > 62) cap = 62;
  if (n > cap) {
    throw resource_cap_error("exhaustive association search refused for " + std::to_string(n) + " flows", cap);
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::uint64_t best_mask = 0;
  double best = -1.0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += (mask >> i) & 1U ? rates.bs[i] : rates.mr[i];
    if (sum > best) {
      best = sum;
      best_mask = mask;
    }
  }
  auto p = Partition::from_bs_mask(n, best_mask);
  return {p, n == 0 ? 0.0 : best};
}

}  // namespace mmtrain

#endif  // MMTRAIN_COALITION_HPP
