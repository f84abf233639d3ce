// Sweeps the attacker share on a small random network and prints per-ratio
// means. Takes a couple of seconds; every number is reproducible.

#include <cstdio>
#include <iostream>

#include "graywatch/graywatch.hpp"

using namespace graywatch;

int main() {
  ScenarioConfig base;
  base.nodes = 60;
  base.range = 70;
  base.flows = 5;
  base.sim_time_ms = 4000;
  base.attacker_data_drop = 1.0;
  base.attacker_rreq_drop = 0.0;  // forwards requests, drops payloads

  auto groups = run_sweep(base, parse_ratios("0:0.24:0.08"), 5, &std::cout);

  std::printf("\nratio  mean_dr  mean_fpr  mean_pdr\n");
  for (const SweepGroup& g : groups) {
    std::printf("%5.2f  %7.2f  %8.2f  %8s\n", g.ratio, g.mean_dr, g.mean_fpr,
                g.mean_pdr ? format3(*g.mean_pdr).c_str() : "-");
  }
  return 0;
}
