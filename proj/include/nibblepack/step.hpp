#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nibblepack/edge_set.hpp"
#include "nibblepack/graph_state.hpp"
#include "nibblepack/params.hpp"

namespace nibblepack {

// A conflict among sampled edges: either two sampled edges completing a
// triangle with a kept edge (size 2), or three sampled edges forming a
// triangle (size 3). Edges are stored sorted ascending.
struct BadElement {
  std::array<Edge, 3> edges{};
  uint8_t size = 0;

  // Lexicographic on the edge tuple; a shorter tuple that is a prefix of a
  // longer one sorts first.
  friend bool operator<(const BadElement& a, const BadElement& b) {
    uint8_t m = std::min(a.size, b.size);
    for (uint8_t k = 0; k < m; ++k)
      if (a.edges[k] != b.edges[k]) return a.edges[k] < b.edges[k];
    return a.size < b.size;
  }
  friend bool operator==(const BadElement& a, const BadElement& b) {
    if (a.size != b.size) return false;
    for (uint8_t k = 0; k < a.size; ++k)
      if (a.edges[k] != b.edges[k]) return false;
    return true;
  }
};

// Everything one step sampled and derived, sufficient for exact replay.
struct StepSample {
  uint32_t step = 0;  // the index this sample produced, i.e. i+1
  EdgeSet gamma;
  std::vector<BadElement> bad;       // sorted
  std::vector<BadElement> repaired;  // greedy maximal edge-disjoint subset
  EdgeSet closed1;
  EdgeSet closed2;
  EdgeSet stabilized;
  uint64_t rng_draws = 0;
};

// Each open edge independently with probability sched.p, from the
// gamma stream at (seed, state.step).
EdgeSet sample_gamma(const GraphState& state, const Schedule& sched, uint64_t seed);

// All conflicts among gamma edges: pairs {wu, wv} ⊆ gamma with uv kept,
// and triangles {uv, vw, wu} ⊆ gamma. Sorted, each element once.
std::vector<BadElement> find_bad(const GraphState& state, const EdgeSet& gamma);

// First-fit scan of the sorted list: keep an element iff it is
// edge-disjoint from everything kept so far. Maximal by construction.
std::vector<BadElement> greedy_disjoint(const std::vector<BadElement>& bad);

// Union of the edges of the elements.
EdgeSet element_edges(const std::vector<BadElement>& elements, uint32_t n);

// Open edges with a mixed-codegree partner in gamma: for xy in gamma,
// xv closes for every taken yv with xv open, and symmetrically.
EdgeSet closed_by_neighbors(const GraphState& state, const EdgeSet& gamma);

// Open edges uv with uw and vw both in gamma for some w.
EdgeSet closed_by_gamma_pairs(const GraphState& state, const EdgeSet& gamma);

// Each open edge e independently with probability
// stabilization_prob(sched, state.step, |Y_e|), from the stabilization
// stream. threads parallelizes the codegree evaluation only; results are
// thread-count independent.
EdgeSet sample_stabilization(const GraphState& state, const Schedule& sched,
                             uint64_t seed, int threads = 1);

// One full step: sample, repair, close, stabilize, then
//   taken ∪= gamma, kept ∪= gamma \ repaired-edges,
//   open  ∖= gamma ∪ closed1 ∪ stabilized ∪ closed2,
// and step advances. Mutates state in place, returns the sample.
StepSample advance(GraphState& state, const Schedule& sched, uint64_t seed,
                   int threads = 1);

}  // namespace nibblepack
