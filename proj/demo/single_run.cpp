// One scenario end to end: association by the coalition game, then the
// greedy superframe schedule.
#include <iostream>

#include "mmtrain/mmtrain.hpp"

int main() {
  using namespace mmtrain;
  ScenarioConfig config;
  config.flow_count = 12;
  const Scenario s = generate_scenario(config, 7);
  const FlowRates rates = flow_rates(s);
  const AssociationResult cg = associate(s, rates, Policy::cg_fd);

  std::cout << "flow  BS[Mb/s]  MR[Mb/s]  side  QoS[Mb/s]\n";
  for (const auto& f : s.flows()) {
    std::cout << f.id << "\t" << rates.bs_direct[f.id] / 1e6 << "\t" << rates.mr_fd[f.id] / 1e6 << "\t"
              << to_string(cg.partition.side(f.id)) << "\t" << f.qos_bps / 1e6 << "\n";
  }
  std::cout << "switches: " << cg.switch_count << ", sum rate: " << cg.sum_rate / 1e9 << " Gb/s\n";

  const auto assigned = cg.assigned_rates();
  std::vector<SlotDemand> demands;
  for (const auto& f : s.flows()) demands.push_back(slot_demand(f.qos_bps, assigned[f.id], s.slots_per_frame(), f.id));
  const Schedule sched = schedule_greedy(demands, s.slots_per_frame());
  std::cout << to_json(sched).dump(2) << "\n";
}
