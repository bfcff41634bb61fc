#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nibblepack/params.hpp"
#include "nibblepack/run.hpp"

namespace nibblepack {

struct RoundStat {
  uint32_t round = 0;
  size_t produced_edges = 0;
  size_t host_edges_before = 0;
};

// Sampled leftover-density trace: after `round` rounds, the host density
// between a fixed pair (A,B) relative to its starting density, against
// the multiplicative decay bracket.
struct InvariantDiagnostic {
  uint32_t round = 0;
  uint32_t pair = 0;
  double ratio = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool within = true;
};

struct PackingResult {
  std::vector<EdgeSet> graphs;
  EdgeSet leftover;
  size_t host_edges = 0;
  size_t covered_edges = 0;
  double coverage = 1.0;  // covered/host, reported as 1 for an empty host
  Constants constants;
  Schedule schedule;
  uint32_t rounds_planned = 0;
  bool stopped_early = false;
  std::vector<RoundStat> per_round;
  std::vector<std::vector<TrajectoryRecord>> round_trajectories;
  std::vector<InvariantDiagnostic> invariant_diagnostics;
  double sampled_min_uniformity = 0.0;  // min e_H(A,B)/|A||B| over sampled pairs
  std::vector<std::string> warnings;
};

struct PackOptions {
  int diagnostic_pairs = 16;
  int precondition_pairs = 32;
  int threads = 1;
  bool track_extremes = false;
};

// Repeatedly runs the nibble on the shrinking host H_{k+1} = H_k \ G_k
// for ceil(log(1/eps)/(rho(1-delta))) rounds, or until two consecutive
// rounds produce no edges. Round k uses seed ^ k. The host-density
// precondition (min sampled e_H(A,B)/|A||B| >= xi) is advisory: failing
// it records a warning, never aborts. Explicit overrides win over the
// eps/xi/C0 arguments.
PackingResult pack(const EdgeSet& host, double eps, double xi, double C0,
                   uint64_t seed, const ScheduleOverrides& ov = {},
                   const PackOptions& po = {});

PackingResult pack_complete(uint32_t n, double eps, uint64_t seed,
                            const ScheduleOverrides& ov = {},
                            const PackOptions& po = {});

struct WitnessEntry {
  uint32_t graph_index = 0;
  bool exact = false;
  int alpha = 0;              // when exact
  double witness_rate = 0.0;  // sampled otherwise
  double standard_error = 0.0;
  size_t target = 0;  // floor(N_r / r)
  bool below_target = false;  // report-only
};

struct Srk3Report {
  PackingResult packing;  // restricted to the first r graphs
  uint32_t vertices = 0;  // N_r = floor(A·r²·log r)
  size_t target = 0;
  std::vector<WitnessEntry> witnesses;
};

// Packs K_{N_r} with eps = 1/2 and reports an independence bound for each
// of the first r graphs: exact when N_r fits the exact solver, otherwise
// the sampled independent-set witness rate at the target size.
Srk3Report srk3_demo(uint32_t r, double A, uint64_t seed,
                     const ScheduleOverrides& ov = {}, const PackOptions& po = {});

struct HandshakeReport {
  uint64_t samples = 0;
  size_t super_size = 0;  // s
  size_t sub_size = 0;    // t
  size_t edges_super = 0; // e(A,B)
  double expected = 0.0;  // e(A,B)·t²/s²
  double mean = 0.0;
  double sd = 0.0;
  double standard_error = 0.0;
  bool pass = false;
};

// Double-counting identity: averaging e(A~,B~) over uniform t-subsets of
// a fixed disjoint pair (A,B) of size s estimates e(A,B)·t²/s².
HandshakeReport handshake_check(const EdgeSet& host, size_t sub_size,
                                size_t super_size, uint64_t samples, uint64_t seed);

}  // namespace nibblepack
