#include "nibblepack/graph_state.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace nibblepack {

GraphState make_start(const EdgeSet& host) {
  GraphState g;
  g.open = host;
  g.taken = EdgeSet(host.vertex_count());
  g.kept = EdgeSet(host.vertex_count());
  g.step = 0;
  return g;
}

size_t open_codegree(const GraphState& g, uint32_t u, uint32_t v) {
  return EdgeSet::common_count(g.open.row(u), g.open.row(v));
}

size_t taken_codegree(const GraphState& g, uint32_t u, uint32_t v) {
  return EdgeSet::common_count(g.taken.row(u), g.taken.row(v));
}

size_t mixed_codegree(const GraphState& g, uint32_t u, uint32_t v) {
  return EdgeSet::common_count(g.open.row(u), g.taken.row(v)) +
         EdgeSet::common_count(g.open.row(v), g.taken.row(u));
}

std::vector<Edge> mixed_codegree_edges(const GraphState& g, uint32_t u, uint32_t v) {
  std::vector<Edge> out;
  auto scan = [&](uint32_t base, std::span<const uint64_t> a, std::span<const uint64_t> b) {
    for (size_t i = 0; i < a.size(); ++i) {
      uint64_t word = a[i] & b[i];
      while (word) {
        out.push_back(make_edge(base, static_cast<uint32_t>((i << 6) + std::countr_zero(word))));
        word &= word - 1;
      }
    }
  };
  scan(u, g.open.row(u), g.taken.row(v));
  scan(v, g.open.row(v), g.taken.row(u));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<uint64_t> vertex_mask(std::span<const uint32_t> vs, uint32_t n,
                                  const char* what) {
  std::vector<uint64_t> mask((n + 63) / 64, 0);
  for (uint32_t v : vs) {
    if (v >= n) throw std::invalid_argument(std::string(what) + ": vertex out of range");
    uint64_t bit = 1ULL << (v & 63);
    if (mask[v >> 6] & bit)
      throw std::invalid_argument(std::string(what) + ": duplicate vertex in set");
    mask[v >> 6] |= bit;
  }
  return mask;
}

}  // namespace

size_t edges_between(const EdgeSet& s, std::span<const uint32_t> a,
                     std::span<const uint32_t> b) {
  uint32_t n = s.vertex_count();
  auto ma = vertex_mask(a, n, "edges_between");
  auto mb = vertex_mask(b, n, "edges_between");
  for (size_t i = 0; i < ma.size(); ++i)
    if (ma[i] & mb[i]) throw std::invalid_argument("edges_between: sets overlap");
  size_t count = 0;
  for (uint32_t v : a) count += EdgeSet::common_count(s.row(v), mb);
  return count;
}

std::vector<Edge> edges_between_list(const EdgeSet& s, std::span<const uint32_t> a,
                                     std::span<const uint32_t> b) {
  uint32_t n = s.vertex_count();
  auto ma = vertex_mask(a, n, "edges_between");
  auto mb = vertex_mask(b, n, "edges_between");
  for (size_t i = 0; i < ma.size(); ++i)
    if (ma[i] & mb[i]) throw std::invalid_argument("edges_between: sets overlap");
  std::vector<Edge> out;
  for (uint32_t v : a) {
    auto row = s.row(v);
    for (size_t i = 0; i < row.size(); ++i) {
      uint64_t word = row[i] & mb[i];
      while (word) {
        out.push_back(make_edge(v, static_cast<uint32_t>((i << 6) + std::countr_zero(word))));
        word &= word - 1;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// First w > v adjacent to both rows, or -1.
int64_t first_common_above(std::span<const uint64_t> a, std::span<const uint64_t> b,
                           uint32_t v) {
  for (size_t i = v >> 6; i < a.size(); ++i) {
    uint64_t word = a[i] & b[i];
    if (i == (v >> 6)) word &= ~((2ULL << (v & 63)) - 1);
    if (word) return static_cast<int64_t>((i << 6) + std::countr_zero(word));
  }
  return -1;
}

int64_t first_common(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  for (size_t i = 0; i < a.size(); ++i) {
    uint64_t word = a[i] & b[i];
    if (word) return static_cast<int64_t>((i << 6) + std::countr_zero(word));
  }
  return -1;
}

}  // namespace

std::vector<SoundnessViolation> check_state_soundness(const GraphState& g) {
  std::vector<SoundnessViolation> out;
  uint32_t n = g.vertex_count();
  if (g.taken.vertex_count() != n || g.kept.vertex_count() != n) {
    out.push_back({"shape-mismatch", n, g.taken.vertex_count(), g.kept.vertex_count()});
    return out;
  }

  g.open.for_each_edge([&](Edge e) {
    if (g.taken.contains(e)) out.push_back({"open-taken-overlap", e.u, e.v, 0});
    int64_t w = first_common(g.taken.row(e.u), g.taken.row(e.v));
    if (w >= 0)
      out.push_back({"open-closes-triangle", e.u, e.v, static_cast<uint32_t>(w)});
  });

  g.kept.for_each_edge([&](Edge e) {
    if (!g.taken.contains(e)) out.push_back({"kept-not-taken", e.u, e.v, 0});
    int64_t w = first_common_above(g.kept.row(e.u), g.kept.row(e.v), e.v);
    if (w >= 0) out.push_back({"kept-triangle", e.u, e.v, static_cast<uint32_t>(w)});
  });

  return out;
}

}  // namespace nibblepack
