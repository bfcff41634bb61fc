#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nibblepack/audit_report.hpp"
#include "nibblepack/graph_state.hpp"
#include "nibblepack/params.hpp"
#include "nibblepack/step.hpp"

namespace nibblepack {

struct OracleResult {
  bool pass = false;
  std::string divergence;  // first differing set and witness, empty on pass
};

// Recomputes one recorded step entirely from the definitions with naive
// O(n³) scans and the same keyed draws, then demands exact set equality
// with the recorded sample and the advanced state. Capped at n <= 64.
OracleResult oracle_step(const GraphState& before, const Schedule& sched,
                         uint64_t seed, const StepSample& sample,
                         const GraphState& after);

size_t triangle_count(const EdgeSet& g);

// Exact independence number: branch-and-bound maximum clique on the
// complement with a greedy-coloring bound. Capped at n <= 60.
int independence_exact(const EdgeSet& g);

struct WitnessRateReport {
  double rate = 0.0;  // fraction of sampled set_size-subsets with no edge
  double standard_error = 0.0;
  uint64_t samples = 0;
  size_t set_size = 0;
};
WitnessRateReport independence_witness_rate(const EdgeSet& g, size_t set_size,
                                            uint64_t samples, uint64_t seed);

struct EqualizationReport {
  double target = 0.0;     // (1-p)^{max{closure threshold, |Y_e|}}
  double frequency = 0.0;  // empirical fraction of trials with e surviving closure
  double band = 0.0;       // 4 binomial standard errors
  uint64_t trials = 0;
  size_t mixed = 0;  // |Y_e| in the probed state
  bool pass = false;
};

// Monte Carlo check that a fixed open edge survives one step's closure
// (neighbor-closure and stabilization combined) with exactly the
// equalized probability. Each trial draws fresh per-edge randomness for
// the coordinates the event depends on.
EqualizationReport equalization_test(const GraphState& state, const Schedule& sched,
                                     Edge e, uint64_t trials, uint64_t seed,
                                     int threads = 1);

struct DensityReport {
  double rho_emp = 0.0;  // |kept| / |open0|
  std::vector<double> ratios;  // per sampled pair: kept(A,B)/open0(A,B)
  double fraction_within = 0.0;  // inside (1±delta)·rho_emp
  int pairs_requested = 0;
  int pairs_accepted = 0;
  double delta = 0.0;
};

// Homogeneity of the kept graph relative to the initial open set: on
// sampled disjoint pairs (A,B) of size s with open0(A,B) >= gamma·s²,
// the per-pair kept density ratio is compared to the global one.
DensityReport edge_density_test(const EdgeSet& kept, const EdgeSet& open0,
                                long long s, double delta, double gamma,
                                int pairs, uint64_t seed, int threads = 1);

}  // namespace nibblepack
