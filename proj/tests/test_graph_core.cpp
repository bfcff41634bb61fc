#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "nibblepack/edge_set.hpp"
#include "nibblepack/graph_state.hpp"
#include "nibblepack/rng.hpp"

using namespace nibblepack;

namespace {

using Pair = std::pair<uint32_t, uint32_t>;

Pair norm(uint32_t a, uint32_t b) { return a < b ? Pair{a, b} : Pair{b, a}; }

EdgeSet random_graph(uint32_t n, double density, uint64_t seed) {
  EdgeSet s(n);
  rng::Sequence seq(seed, 0, Stream::Audit, 1);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v)
      if (seq.next_u01() < density) s.insert(u, v);
  return s;
}

}  // namespace

TEST_SUITE("graph-core") {

TEST_CASE("edges are canonical and densely indexable") {
  Edge e = make_edge(9, 3);
  CHECK(e.u == 3);
  CHECK(e.v == 9);
  CHECK(make_edge(3, 9) == e);
  CHECK(make_edge(0, 1) < make_edge(0, 2));
  CHECK(make_edge(0, 5) < make_edge(1, 2));
  CHECK(edge_index(make_edge(3, 9), 20) == 3 * 20 + 9);
}

TEST_CASE("edge set agrees with a reference model under random churn") {
  // n = 70 so every row spans a word boundary
  const uint32_t n = 70;
  EdgeSet s(n);
  std::set<Pair> model;
  rng::Sequence seq(42, 0, Stream::Audit, 2);
  for (int op = 0; op < 4000; ++op) {
    uint32_t a = static_cast<uint32_t>(seq.next_below(n));
    uint32_t b = static_cast<uint32_t>(seq.next_below(n));
    if (a == b) continue;
    if (seq.next_u01() < 0.6) {
      bool fresh = s.insert(a, b);
      CHECK(fresh == model.insert(norm(a, b)).second);
    } else {
      bool removed = s.erase(a, b);
      CHECK(removed == (model.erase(norm(a, b)) > 0));
    }
  }
  CHECK(s.edge_count() == model.size());
  CHECK(s.recount() == model.size());
  for (uint32_t u = 0; u < n; ++u) {
    size_t deg = 0;
    for (uint32_t v = 0; v < n; ++v) {
      bool want = u != v && model.count(norm(u, v)) > 0;
      CHECK(s.contains(u, v) == want);
      if (want) ++deg;
    }
    CHECK(s.degree(u) == deg);
  }
  // iteration is lexicographic and covers exactly the model
  auto listed = s.edges();
  CHECK(std::is_sorted(listed.begin(), listed.end()));
  CHECK(listed.size() == model.size());
  for (Edge e : listed) CHECK(model.count({e.u, e.v}) == 1);

  std::vector<uint32_t> nb;
  s.neighbors(37, nb);
  CHECK(std::is_sorted(nb.begin(), nb.end()));
  CHECK(nb.size() == s.degree(37));

  s.clear();
  CHECK(s.empty());
  CHECK(s.recount() == 0);
}

TEST_CASE("set algebra matches per-edge loops") {
  const uint32_t n = 67;
  EdgeSet a = random_graph(n, 0.3, 7);
  EdgeSet b = random_graph(n, 0.3, 8);

  EdgeSet uni = a;
  uni.insert_all(b);
  EdgeSet diff = a;
  diff.erase_all(b);
  size_t common = 0;
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v) {
      CHECK(uni.contains(u, v) == (a.contains(u, v) || b.contains(u, v)));
      CHECK(diff.contains(u, v) == (a.contains(u, v) && !b.contains(u, v)));
      if (a.contains(u, v) && b.contains(u, v)) ++common;
    }
  CHECK(uni.edge_count() == a.edge_count() + b.edge_count() - common);
  CHECK(diff.edge_count() == a.edge_count() - common);

  CHECK(a.intersects(b) == (common > 0));
  CHECK(diff.is_subset_of(a));
  CHECK_FALSE(uni.is_subset_of(a));
  CHECK(a.is_subset_of(uni));
  EdgeSet none(n);
  CHECK_FALSE(a.intersects(none));
  CHECK(none.is_subset_of(a));

  // equality is structural, independent of insertion order
  EdgeSet c(n), d(n);
  auto es = a.edges();
  for (Edge e : es) c.insert(e);
  for (auto it = es.rbegin(); it != es.rend(); ++it) d.insert(*it);
  CHECK(c == d);
  d.erase(es.front());
  CHECK_FALSE(c == d);

  EdgeSet other(n + 1);
  CHECK_THROWS_AS(a.insert_all(other), std::invalid_argument);
  CHECK_THROWS_AS(a.erase_all(other), std::invalid_argument);
  CHECK_THROWS_AS(a.intersects(other), std::invalid_argument);
  CHECK_THROWS_AS(a.is_subset_of(other), std::invalid_argument);
}

TEST_CASE("complete graph has every pair") {
  EdgeSet k = complete_graph(9);
  CHECK(k.edge_count() == 36);
  for (uint32_t u = 0; u < 9; ++u)
    for (uint32_t v = u + 1; v < 9; ++v) CHECK(k.contains(u, v));
}

TEST_CASE("codegrees match explicit scans") {
  const uint32_t n = 80;
  GraphState g;
  g.open = random_graph(n, 0.25, 11);
  g.taken = random_graph(n, 0.25, 12);
  // keep the two layers disjoint, as the process guarantees
  g.taken.erase_all(g.open);
  g.kept = g.taken;
  g.step = 3;

  for (auto [u, v] : {Pair{0, 1}, Pair{5, 64}, Pair{63, 64}, Pair{2, 79}}) {
    size_t open_c = 0, taken_c = 0;
    std::vector<Edge> mixed;
    for (uint32_t w = 0; w < n; ++w) {
      if (w == u || w == v) continue;
      if (g.open.contains(u, w) && g.open.contains(v, w)) ++open_c;
      if (g.taken.contains(u, w) && g.taken.contains(v, w)) ++taken_c;
      if (g.open.contains(u, w) && g.taken.contains(v, w))
        mixed.push_back(make_edge(u, w));
      if (g.open.contains(v, w) && g.taken.contains(u, w))
        mixed.push_back(make_edge(v, w));
    }
    std::sort(mixed.begin(), mixed.end());
    CHECK(open_codegree(g, u, v) == open_c);
    CHECK(taken_codegree(g, u, v) == taken_c);
    CHECK(mixed_codegree(g, u, v) == mixed.size());
    CHECK(mixed_codegree_edges(g, u, v) == mixed);
  }

  // common_count is symmetric and matches codegree through rows
  CHECK(EdgeSet::common_count(g.open.row(5), g.open.row(64)) ==
        EdgeSet::common_count(g.open.row(64), g.open.row(5)));
}

TEST_CASE("edges between vertex sets: brute force and validation") {
  const uint32_t n = 70;
  EdgeSet s = random_graph(n, 0.4, 19);
  std::vector<uint32_t> a = {0, 3, 65, 17, 40};
  std::vector<uint32_t> b = {1, 2, 66, 39, 64, 9};

  size_t want = 0;
  std::vector<Edge> want_list;
  for (uint32_t x : a)
    for (uint32_t y : b)
      if (s.contains(x, y)) {
        ++want;
        want_list.push_back(make_edge(x, y));
      }
  std::sort(want_list.begin(), want_list.end());
  CHECK(edges_between(s, a, b) == want);
  CHECK(edges_between_list(s, a, b) == want_list);

  EdgeSet k = complete_graph(8);
  std::vector<uint32_t> left = {0, 1, 2}, right = {5, 6, 7};
  CHECK(edges_between(k, left, right) == 9);

  std::vector<uint32_t> overlap = {3, 10};  // 3 is already in a
  CHECK_THROWS_AS(edges_between(s, a, overlap), std::invalid_argument);
  std::vector<uint32_t> dup = {4, 4};
  CHECK_THROWS_AS(edges_between(s, dup, b), std::invalid_argument);
  std::vector<uint32_t> oob = {200};
  CHECK_THROWS_AS(edges_between(s, a, oob), std::invalid_argument);
  CHECK_THROWS_AS(edges_between_list(s, dup, b), std::invalid_argument);
}

TEST_CASE("soundness checker flags each violation kind with witnesses") {
  auto fresh = [] {
    GraphState g;
    g.open = EdgeSet(6);
    g.taken = EdgeSet(6);
    g.kept = EdgeSet(6);
    return g;
  };

  GraphState ok = fresh();
  ok.open.insert(0, 1);
  ok.taken.insert(2, 3);
  ok.kept.insert(2, 3);
  CHECK(check_state_soundness(ok).empty());

  GraphState overlap = fresh();
  overlap.open.insert(0, 1);
  overlap.taken.insert(0, 1);
  auto v1 = check_state_soundness(overlap);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0].kind == "open-taken-overlap");
  CHECK(v1[0].u == 0);
  CHECK(v1[0].v == 1);

  GraphState ghost = fresh();
  ghost.kept.insert(1, 2);
  auto v2 = check_state_soundness(ghost);
  REQUIRE(v2.size() == 1);
  CHECK(v2[0].kind == "kept-not-taken");

  GraphState tri = fresh();
  for (auto [x, y] : {Pair{0, 1}, Pair{1, 2}, Pair{0, 2}}) {
    tri.taken.insert(x, y);
    tri.kept.insert(x, y);
  }
  auto v3 = check_state_soundness(tri);
  REQUIRE(v3.size() == 1);  // reported once, for the lexicographically first edge
  CHECK(v3[0].kind == "kept-triangle");
  CHECK(v3[0].u == 0);
  CHECK(v3[0].v == 1);
  CHECK(v3[0].w == 2);

  GraphState closes = fresh();
  closes.open.insert(0, 1);
  closes.taken.insert(0, 5);
  closes.taken.insert(1, 5);
  auto v4 = check_state_soundness(closes);
  REQUIRE(v4.size() == 1);
  CHECK(v4[0].kind == "open-closes-triangle");
  CHECK(v4[0].w == 5);

  GraphState shape = fresh();
  shape.taken = EdgeSet(7);
  auto v5 = check_state_soundness(shape);
  REQUIRE(v5.size() == 1);
  CHECK(v5[0].kind == "shape-mismatch");
}

}  // TEST_SUITE
