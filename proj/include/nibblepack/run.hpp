#pragma once

#include <cstdint>
#include <vector>

#include "nibblepack/audit_report.hpp"
#include "nibblepack/step.hpp"

namespace nibblepack {

// Snapshot of counts and extremes at step i, next to the predictions the
// schedule makes for them.
struct TrajectoryRecord {
  uint32_t step = 0;
  size_t open_count = 0;
  size_t kept_count = 0;
  size_t taken_count = 0;
  double predicted_open_fraction = 0.0;  // q_i
  double predicted_density = 0.0;        // pi_i / sqrt(n)
  size_t max_open_degree = 0;
  size_t max_mixed_codegree = 0;  // 0 when extreme tracking is off
  size_t max_codegree = 0;        // 0 when extreme tracking is off
};

struct RunOptions {
  bool retain_samples = false;  // O(n²) memory per step
  bool retain_states = false;   // O(n²) memory per step
  bool track_extremes = true;   // all-pairs codegree columns, quadratic per step
  int threads = 1;
};

struct RunResult {
  EdgeSet G;  // kept edges after the final step
  std::vector<TrajectoryRecord> trajectories;  // length steps+1
  std::vector<StepSample> samples;             // length steps when retained
  std::vector<GraphState> states;              // length steps+1 when retained
};

// Runs all sched.steps steps on the host. G is triangle-free and a
// subgraph of the host; an empty host yields an empty G.
RunResult run(const EdgeSet& host, const Schedule& sched, uint64_t seed,
              const RunOptions& opts = {});

struct AuditOptions {
  int budget = 32;  // sampled (A,B) pairs per event family
  uint64_t seed = 1;
  int threads = 1;
};

// Audits the retained history against the per-step events:
// degree and codegree caps are checked exhaustively; pair events are
// checked on `budget` sampled disjoint vertex-set pairs (restricted to
// host-dense pairs where the event demands it); the final kept/open
// densities are compared per pair. Bounds of asymptotic origin are
// report-only; state soundness is pass/fail. Sampled-edge degree checks
// need `samples`; they are skipped when none were retained.
AuditReport audit_events(const std::vector<GraphState>& history,
                         const std::vector<StepSample>& samples,
                         const Schedule& sched, const AuditOptions& opts = {});

}  // namespace nibblepack
