#ifndef MMTRAIN_SCHEDULER_HPP
#define MMTRAIN_SCHEDULER_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtrain/coalition.hpp"
#include "mmtrain/errors.hpp"

// TDMA superframe scheduling. A superframe carries M equal slots; each
// selected flow gets one pairing (a run of consecutive slots) long enough to
// meet its throughput requirement.
namespace mmtrain {

using SlotCount = std::int64_t;

struct SlotDemand {
  FlowId flow_id = 0;
  double rate = 0.0;  // bits/s under the flow's association
  double qos = 0.0;   // required throughput, bits/s
  /// Smallest delta with rate*delta/M >= qos; empty when rate == 0 < qos.
  std::optional<SlotCount> required_slots;

  bool schedulable() const noexcept { return required_slots.has_value(); }
};

/// Achieved throughput for `slots` slots of an M-slot frame.
inline double throughput(double rate, SlotCount slots, SlotCount slots_per_frame) {
  return rate * static_cast<double>(slots) / static_cast<double>(slots_per_frame);
}

inline bool satisfied(double achieved, double required) { return achieved >= required; }

inline SlotDemand slot_demand(double qos, double rate, SlotCount slots_per_frame, FlowId id = 0) {
  if (slots_per_frame < 1) throw domain_error("slots per frame must be at least 1");
  if (!(qos >= 0.0) || !(rate >= 0.0)) throw domain_error("qos and rate must be non-negative");
  SlotDemand d{id, rate, qos, std::nullopt};
  if (qos == 0.0) {
    d.required_slots = 0;
    return d;
  }
  if (rate == 0.0) return d;

  const double exact = qos * static_cast<double>(slots_per_frame) / rate;
  // Demands beyond 2^62 slots cannot fit any frame; treat them as unschedulable.
  if (!std::isfinite(exact) || exact > 4.6e18) return d;
  auto delta = static_cast<SlotCount>(std::ceil(exact));
  // Align with the satisfaction test, which is evaluated in floating point.
  while (!satisfied(throughput(rate, delta, slots_per_frame), qos)) ++delta;
  while (delta > 0 && satisfied(throughput(rate, delta - 1, slots_per_frame), qos)) --delta;
  d.required_slots = delta;
  return d;
}

struct Pairing {
  FlowId flow_id;
  SlotCount start_slot;
  SlotCount slot_count;

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

struct Schedule {
  SlotCount slots_per_frame = 0;
  std::vector<Pairing> pairings;
  SlotCount total_slots_used = 0;
  std::map<FlowId, bool> satisfied_flags;

  std::size_t satisfied_count() const {
    return static_cast<std::size_t>(
        std::count_if(satisfied_flags.begin(), satisfied_flags.end(), [](const auto& kv) { return kv.second; }));
  }

  SlotCount slots_of(FlowId id) const {
    for (const auto& p : pairings)
      if (p.flow_id == id) return p.slot_count;
    return 0;
  }
};

struct ScheduleOptions {
  /// Ascending slot demand (ties by flow id). Off: flow-id order.
  bool sort_by_demand = true;
  /// Grant leftover slots to the first flow that did not fit. It still fails its QoS.
  bool top_up = false;
};

/// Count-maximising greedy: order the demands, take the longest prefix whose
/// cumulative demand fits in M, lay pairings out back to back from slot 0.
/// Unschedulable flows never get slots.
inline Schedule schedule_greedy(std::span<const SlotDemand> demands, SlotCount slots_per_frame,
                                ScheduleOptions opts = {}) {
  if (slots_per_frame < 1) throw domain_error("slots per frame must be at least 1");
  std::vector<const SlotDemand*> order;
  order.reserve(demands.size());
  for (const auto& d : demands)
    if (d.schedulable()) order.push_back(&d);
  if (opts.sort_by_demand) {
    std::stable_sort(order.begin(), order.end(), [](const SlotDemand* x, const SlotDemand* y) {
      if (*x->required_slots != *y->required_slots) return *x->required_slots < *y->required_slots;
      return x->flow_id < y->flow_id;
    });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [](const SlotDemand* x, const SlotDemand* y) { return x->flow_id < y->flow_id; });
  }

  Schedule s;
  s.slots_per_frame = slots_per_frame;
  for (const auto& d : demands) s.satisfied_flags[d.flow_id] = false;

  SlotCount used = 0;
  std::size_t k = 0;
  for (; k < order.size(); ++k) {
    const SlotCount need = *order[k]->required_slots;
    if (need > slots_per_frame - used) break;
    if (need > 0) s.pairings.push_back({order[k]->flow_id, used, need});
    used += need;
    s.satisfied_flags[order[k]->flow_id] = true;
  }
  if (opts.top_up && k < order.size() && used < slots_per_frame) {
    s.pairings.push_back({order[k]->flow_id, used, slots_per_frame - used});
    used = slots_per_frame;
  }
  s.total_slots_used = used;
  return s;
}

/// Throughput actually delivered to a flow: R * gamma / M, zero when unscheduled.
inline double achieved_throughput(const Schedule& s, FlowId id, double rate) {
  if (!s.satisfied_flags.contains(id)) throw lookup_error("flow " + std::to_string(id) + " is not in the schedule");
  return throughput(rate, s.slots_of(id), s.slots_per_frame);
}

/// Expected satisfied count under a constant per-segment blockage probability.
inline double objective_value(const Schedule& s, double blockage_probability) {
  if (!(blockage_probability >= 0.0 && blockage_probability <= 1.0)) {
    throw domain_error("blockage probability must lie in [0, 1]");
  }
  return (1.0 - blockage_probability) * static_cast<double>(s.satisfied_count());
}

/// Structural problems with a schedule (overlap, duplicates, overrun). Empty when valid.
inline std::vector<std::string> schedule_violations(const Schedule& s) {
  std::vector<std::string> v;
  std::map<FlowId, int> seen;
  SlotCount total = 0;
  auto sorted = s.pairings;
  std::sort(sorted.begin(), sorted.end(), [](const Pairing& a, const Pairing& b) { return a.start_slot < b.start_slot; });
  SlotCount cursor = 0;
  for (const auto& p : sorted) {
    if (++seen[p.flow_id] > 1) v.push_back("flow " + std::to_string(p.flow_id) + " holds more than one pairing");
    if (!s.satisfied_flags.contains(p.flow_id)) v.push_back("pairing for unknown flow " + std::to_string(p.flow_id));
    if (p.slot_count <= 0) v.push_back("pairing for flow " + std::to_string(p.flow_id) + " is empty");
    if (p.start_slot < cursor) v.push_back("pairing for flow " + std::to_string(p.flow_id) + " overlaps another");
    if (p.start_slot < 0 || p.start_slot + p.slot_count > s.slots_per_frame) {
      v.push_back("pairing for flow " + std::to_string(p.flow_id) + " runs outside the frame");
    }
    cursor = std::max(cursor, p.start_slot + p.slot_count);
    total += p.slot_count;
  }
  if (total > s.slots_per_frame) v.push_back("pairings use more than M slots");
  if (total != s.total_slots_used) v.push_back("total_slots_used disagrees with the pairings");
  return v;
}

/// Largest number of flows whose demands fit together in M slots, by
/// enumerating every subset.
inline std::size_t schedule_oracle(std::span<const SlotDemand> demands, SlotCount slots_per_frame,
                                   std::size_t cap = default_enumeration_cap) {
  const std::size_t n = demands.size();
  if (n > cap || n > 62) {
    throw resource_cap_error("brute-force schedule search refused for " + std::to_string(n) + " flows", cap);
  }
  std::vector<SlotCount> need(n);
  for (std::size_t i = 0; i < n; ++i)
    need[i] = demands[i].schedulable() ? *demands[i].required_slots : slots_per_frame + 1;

  std::size_t best = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size <= best) continue;
    SlotCount sum = 0;
    for (std::size_t i = 0; i < n && sum <= slots_per_frame; ++i)
      if ((mask >> i) & 1U) sum += need[i];
    if (sum <= slots_per_frame) best = size;
  }
  return best;
}

/// One entry per flow; unscheduled flows carry a null start slot.
inline nlohmann::json to_json(const Schedule& s) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [id, ok] : s.satisfied_flags) {
    nlohmann::json e;
    e["flow_id"] = id;
    e["start_slot"] = nullptr;
    e["slot_count"] = 0;
    for (const auto& p : s.pairings) {
      if (p.flow_id == id) {
        e["start_slot"] = p.start_slot;
        e["slot_count"] = p.slot_count;
      }
    }
    e["satisfied"] = ok;
    entries.push_back(std::move(e));
  }
  return {{"slots_per_frame", s.slots_per_frame},
          {"total_slots_used", s.total_slots_used},
          {"satisfied_count", s.satisfied_count()},
          {"flows", std::move(entries)}};
}

}  // namespace mmtrain

#endif  // MMTRAIN_SCHEDULER_HPP
