#include "nibblepack/step.hpp"

#include <bit>
#include <stdexcept>
#include <unordered_set>

#include "nibblepack/parallel.hpp"
#include "nibblepack/rng.hpp"

namespace nibblepack {

EdgeSet sample_gamma(const GraphState& state, const Schedule& sched, uint64_t seed) {
  uint32_t n = state.vertex_count();
  EdgeSet gamma(n);
  if (sched.p <= 0.0) return gamma;
  state.open.for_each_edge([&](Edge e) {
    if (rng::draw(seed, state.step, Stream::Gamma, edge_index(e, n)) < sched.p)
      gamma.insert(e);
  });
  return gamma;
}

std::vector<BadElement> find_bad(const GraphState& state, const EdgeSet& gamma) {
  uint32_t n = state.vertex_count();
  std::vector<BadElement> out;
  std::vector<uint32_t> nbr;

  // Two gamma edges at a common vertex completing a kept edge.
  for (uint32_t w = 0; w < n; ++w) {
    gamma.neighbors(w, nbr);
    for (size_t a = 0; a < nbr.size(); ++a)
      for (size_t b = a + 1; b < nbr.size(); ++b)
        if (state.kept.contains(nbr[a], nbr[b])) {
          BadElement el;
          el.size = 2;
          Edge e1 = make_edge(w, nbr[a]), e2 = make_edge(w, nbr[b]);
          if (e2 < e1) std::swap(e1, e2);
          el.edges[0] = e1;
          el.edges[1] = e2;
          out.push_back(el);
        }
  }

  // Triangles inside gamma, each found at its lexicographically first edge.
  gamma.for_each_edge([&](Edge e) {
    auto ru = gamma.row(e.u), rv = gamma.row(e.v);
    for (size_t i = e.v >> 6; i < ru.size(); ++i) {
      uint64_t word = ru[i] & rv[i];
      if (i == static_cast<size_t>(e.v >> 6)) word &= ~((2ULL << (e.v & 63)) - 1);
      while (word) {
        uint32_t w = static_cast<uint32_t>((i << 6) + std::countr_zero(word));
        word &= word - 1;
        BadElement el;
        el.size = 3;
        el.edges = {e, Edge{e.u, w}, Edge{e.v, w}};
        out.push_back(el);
      }
    }
  });

  std::sort(out.begin(), out.end());
  return out;
}

namespace {

uint64_t edge_pack(Edge e) { return (static_cast<uint64_t>(e.u) << 32) | e.v; }

}  // namespace

std::vector<BadElement> greedy_disjoint(const std::vector<BadElement>& bad) {
  std::vector<BadElement> out;
  std::unordered_set<uint64_t> used;
  for (const auto& el : bad) {
    bool clash = false;
    for (uint8_t k = 0; k < el.size && !clash; ++k)
      clash = used.contains(edge_pack(el.edges[k]));
    if (clash) continue;
    out.push_back(el);
    for (uint8_t k = 0; k < el.size; ++k) used.insert(edge_pack(el.edges[k]));
  }
  return out;
}

EdgeSet element_edges(const std::vector<BadElement>& elements, uint32_t n) {
  EdgeSet out(n);
  for (const auto& el : elements)
    for (uint8_t k = 0; k < el.size; ++k) out.insert(el.edges[k]);
  return out;
}

EdgeSet closed_by_neighbors(const GraphState& state, const EdgeSet& gamma) {
  uint32_t n = state.vertex_count();
  EdgeSet c1(n);
  auto mark = [&](uint32_t x, uint32_t y) {
    // xw open with yw taken: the gamma edge xy lands in Y_{xw}.
    auto ro = state.open.row(x);
    auto rt = state.taken.row(y);
    for (size_t i = 0; i < ro.size(); ++i) {
      uint64_t word = ro[i] & rt[i];
      while (word) {
        uint32_t w = static_cast<uint32_t>((i << 6) + std::countr_zero(word));
        word &= word - 1;
        c1.insert(x, w);
      }
    }
  };
  gamma.for_each_edge([&](Edge e) {
    mark(e.u, e.v);
    mark(e.v, e.u);
  });
  return c1;
}

EdgeSet closed_by_gamma_pairs(const GraphState& state, const EdgeSet& gamma) {
  uint32_t n = state.vertex_count();
  EdgeSet c2(n);
  std::vector<uint32_t> nbr;
  for (uint32_t w = 0; w < n; ++w) {
    gamma.neighbors(w, nbr);
    for (size_t a = 0; a < nbr.size(); ++a)
      for (size_t b = a + 1; b < nbr.size(); ++b)
        if (state.open.contains(nbr[a], nbr[b])) c2.insert(nbr[a], nbr[b]);
  }
  return c2;
}

EdgeSet sample_stabilization(const GraphState& state, const Schedule& sched,
                             uint64_t seed, int threads) {
  uint32_t n = state.vertex_count();
  EdgeSet out(n);
  std::vector<Edge> open_edges = state.open.edges();
  if (open_edges.empty()) return out;

  size_t workers = threads < 1 ? 1 : static_cast<size_t>(threads);
  std::vector<std::vector<Edge>> picked(workers);
  parallel_chunks(open_edges.size(), threads, [&](size_t c, size_t lo, size_t hi) {
    std::vector<double> prob_by_y;  // probabilities repeat heavily across edges
    auto& local = picked[c];
    for (size_t k = lo; k < hi; ++k) {
      Edge e = open_edges[k];
      size_t y = mixed_codegree(state, e.u, e.v);
      if (y >= prob_by_y.size()) prob_by_y.resize(y + 1, -1.0);
      double ph = prob_by_y[y];
      if (ph < 0.0)
        ph = prob_by_y[y] =
            stabilization_prob(sched, static_cast<int>(state.step), static_cast<double>(y));
      if (ph > 0.0 &&
          rng::draw(seed, state.step, Stream::Stab, edge_index(e, n)) < ph)
        local.push_back(e);
    }
  });
  for (const auto& chunk : picked)
    for (Edge e : chunk) out.insert(e);
  return out;
}

StepSample advance(GraphState& state, const Schedule& sched, uint64_t seed,
                   int threads) {
  if (state.step >= static_cast<uint32_t>(sched.steps))
    throw std::invalid_argument("advance: schedule exhausted");
  if (sched.n != state.vertex_count())
    throw std::invalid_argument("advance: schedule/state vertex count mismatch");

  StepSample s;
  s.gamma = sample_gamma(state, sched, seed);
  s.bad = find_bad(state, s.gamma);
  s.repaired = greedy_disjoint(s.bad);
  s.closed1 = closed_by_neighbors(state, s.gamma);
  s.closed2 = closed_by_gamma_pairs(state, s.gamma);
  s.stabilized = sample_stabilization(state, sched, seed, threads);
  s.rng_draws = 2 * state.open.edge_count();
  s.step = state.step + 1;

  EdgeSet kept_delta = s.gamma;
  kept_delta.erase_all(element_edges(s.repaired, state.vertex_count()));
  state.taken.insert_all(s.gamma);
  state.kept.insert_all(kept_delta);
  state.open.erase_all(s.gamma);
  state.open.erase_all(s.closed1);
  state.open.erase_all(s.stabilized);
  state.open.erase_all(s.closed2);
  state.step += 1;
  return s;
}

}  // namespace nibblepack
