#pragma once

#include <string>
#include <vector>

#include "nibblepack/edge_set.hpp"

namespace nibblepack {

// Process state after `step` steps: the open edges still eligible for
// sampling, every edge sampled so far (taken), and the triangle-free
// subset retained after repairs (kept).
struct GraphState {
  EdgeSet open;
  EdgeSet taken;
  EdgeSet kept;
  uint32_t step = 0;

  uint32_t vertex_count() const { return open.vertex_count(); }
};

// Fresh state on a host: all host edges open, nothing taken or kept.
GraphState make_start(const EdgeSet& host);

// Common open neighbors of u and v.
size_t open_codegree(const GraphState& g, uint32_t u, uint32_t v);

// Common taken neighbors of u and v.
size_t taken_codegree(const GraphState& g, uint32_t u, uint32_t v);

// Open edges at u whose closing partner at v is taken, and vice versa:
// {uw open : vw taken} ∪ {vw open : uw taken}. The two branches are
// disjoint, so each qualifying edge is counted once.
size_t mixed_codegree(const GraphState& g, uint32_t u, uint32_t v);
std::vector<Edge> mixed_codegree_edges(const GraphState& g, uint32_t u, uint32_t v);

// Edges of S with one endpoint in A and the other in B.
// A and B must be disjoint duplicate-free vertex sets.
size_t edges_between(const EdgeSet& s, std::span<const uint32_t> a,
                     std::span<const uint32_t> b);
std::vector<Edge> edges_between_list(const EdgeSet& s, std::span<const uint32_t> a,
                                     std::span<const uint32_t> b);

struct SoundnessViolation {
  std::string kind;  // "open-taken-overlap", "kept-not-taken", "kept-triangle", "open-closes-triangle"
  uint32_t u = 0, v = 0, w = 0;
};

// Empty iff all state invariants hold: kept ⊆ taken, open ∩ taken = ∅,
// kept triangle-free, and no open edge forms a triangle with two taken
// edges. Violations carry their witness vertices.
std::vector<SoundnessViolation> check_state_soundness(const GraphState& g);

}  // namespace nibblepack
