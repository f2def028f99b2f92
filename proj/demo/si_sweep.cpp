// Mean sum rate of every policy across residual self-interference levels.
#include <iostream>

#include "mmtrain/mmtrain.hpp"

int main() {
  using namespace mmtrain;
  SweepSpec spec;
  spec.parameter = SweepParameter::si_level_db;
  spec.values = default_sweep_values(spec.parameter);
  spec.seeds = seed_range(1, 50);
  spec.policies = {Policy::cg_fd, Policy::cg_hd, Policy::fbsc, Policy::fmrc};
  const SweepResult res = run_sweep(spec);
  write_csv(std::cout, res.means);
}
