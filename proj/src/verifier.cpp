#include "nibblepack/verifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nibblepack/parallel.hpp"
#include "nibblepack/rng.hpp"

namespace nibblepack {

namespace {

std::string edge_str(Edge e) {
  return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
}

std::string element_str(const BadElement& el) {
  std::string s = "{";
  for (uint8_t k = 0; k < el.size; ++k) {
    if (k) s += ",";
    s += edge_str(el.edges[k]);
  }
  return s + "}";
}

std::string set_divergence(const char* name, const EdgeSet& recomputed,
                           const EdgeSet& recorded) {
  uint32_t n = recomputed.vertex_count();
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v) {
      bool a = recomputed.contains(u, v), b = recorded.contains(u, v);
      if (a != b)
        return std::string(name) + " differs at " + edge_str({u, v}) +
               ": recomputed " + (a ? "contains" : "lacks") + " it, recorded " +
               (b ? "contains" : "lacks") + " it";
    }
  return std::string(name) + " differs in shape";
}

std::string list_divergence(const char* name, const std::vector<BadElement>& recomputed,
                            const std::vector<BadElement>& recorded) {
  size_t k = 0;
  while (k < recomputed.size() && k < recorded.size() &&
         recomputed[k] == recorded[k])
    ++k;
  auto at = [&](const std::vector<BadElement>& v) {
    return k < v.size() ? element_str(v[k]) : std::string("<end>");
  };
  return std::string(name) + " differs at position " + std::to_string(k) +
         ": recomputed " + at(recomputed) + ", recorded " + at(recorded);
}

}  // namespace

OracleResult oracle_step(const GraphState& before, const Schedule& sched,
                         uint64_t seed, const StepSample& sample,
                         const GraphState& after) {
  uint32_t n = before.vertex_count();
  if (n > 64) throw std::invalid_argument("oracle_step: capped at 64 vertices");
  if (sched.n != n) throw std::invalid_argument("oracle_step: schedule is for a different n");
  if (before.step >= static_cast<uint32_t>(sched.steps))
    throw std::invalid_argument("oracle_step: state is already past the schedule");

  auto fail = [](std::string msg) {
    OracleResult r;
    r.pass = false;
    r.divergence = std::move(msg);
    return r;
  };
  uint32_t i = before.step;

  EdgeSet gamma(n);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v)
      if (before.open.contains(u, v) &&
          rng::draw(seed, i, Stream::Gamma, edge_index({u, v}, n)) < sched.p)
        gamma.insert(u, v);
  if (!(gamma == sample.gamma))
    return fail(set_divergence("gamma", gamma, sample.gamma));

  std::vector<BadElement> bad;
  for (uint32_t w = 0; w < n; ++w)
    for (uint32_t a = 0; a < n; ++a) {
      if (a == w || !gamma.contains(w, a)) continue;
      for (uint32_t b = a + 1; b < n; ++b) {
        if (b == w || !gamma.contains(w, b)) continue;
        if (!before.kept.contains(a, b)) continue;
        BadElement el;
        el.size = 2;
        el.edges[0] = make_edge(w, a);
        el.edges[1] = make_edge(w, b);
        if (el.edges[1] < el.edges[0]) std::swap(el.edges[0], el.edges[1]);
        bad.push_back(el);
      }
    }
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v) {
      if (!gamma.contains(u, v)) continue;
      for (uint32_t w = v + 1; w < n; ++w)
        if (gamma.contains(u, w) && gamma.contains(v, w)) {
          BadElement el;
          el.size = 3;
          el.edges = {Edge{u, v}, Edge{u, w}, Edge{v, w}};
          bad.push_back(el);
        }
    }
  std::sort(bad.begin(), bad.end());
  if (bad != sample.bad) return fail(list_divergence("bad", bad, sample.bad));

  std::vector<BadElement> repaired;
  std::vector<Edge> used;
  for (const BadElement& el : bad) {
    bool disjoint = true;
    for (uint8_t k = 0; k < el.size && disjoint; ++k)
      for (Edge e : used)
        if (e == el.edges[k]) {
          disjoint = false;
          break;
        }
    if (!disjoint) continue;
    repaired.push_back(el);
    for (uint8_t k = 0; k < el.size; ++k) used.push_back(el.edges[k]);
  }
  if (repaired != sample.repaired)
    return fail(list_divergence("repaired", repaired, sample.repaired));

  EdgeSet closed1(n), closed2(n), stabilized(n);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v) {
      if (!before.open.contains(u, v)) continue;
      bool c1 = false, c2 = false;
      size_t y = 0;
      for (uint32_t w = 0; w < n; ++w) {
        if (w == u || w == v) continue;
        bool uw_open = before.open.contains(u, w), vw_open = before.open.contains(v, w);
        bool uw_taken = before.taken.contains(u, w), vw_taken = before.taken.contains(v, w);
        bool uw_gamma = gamma.contains(u, w), vw_gamma = gamma.contains(v, w);
        if (uw_open && vw_taken) ++y;
        if (vw_open && uw_taken) ++y;
        if ((uw_gamma && vw_taken) || (vw_gamma && uw_taken)) c1 = true;
        if (uw_gamma && vw_gamma) c2 = true;
      }
      if (c1) closed1.insert(u, v);
      if (c2) closed2.insert(u, v);
      double ph = stabilization_prob(sched, static_cast<int>(i), static_cast<double>(y));
      if (rng::draw(seed, i, Stream::Stab, edge_index({u, v}, n)) < ph)
        stabilized.insert(u, v);
    }
  if (!(closed1 == sample.closed1))
    return fail(set_divergence("closed1", closed1, sample.closed1));
  if (!(closed2 == sample.closed2))
    return fail(set_divergence("closed2", closed2, sample.closed2));
  if (!(stabilized == sample.stabilized))
    return fail(set_divergence("stabilized", stabilized, sample.stabilized));

  uint64_t expected_draws = 2 * static_cast<uint64_t>(before.open.edge_count());
  if (sample.rng_draws != expected_draws)
    return fail("rng_draws differs: recomputed " + std::to_string(expected_draws) +
                ", recorded " + std::to_string(sample.rng_draws));
  if (sample.step != i + 1)
    return fail("sample step index differs: expected " + std::to_string(i + 1) +
                ", recorded " + std::to_string(sample.step));

  EdgeSet taken = before.taken;
  taken.insert_all(gamma);
  EdgeSet kept_delta = gamma;
  kept_delta.erase_all(element_edges(repaired, n));
  EdgeSet kept = before.kept;
  kept.insert_all(kept_delta);
  EdgeSet open = before.open;
  open.erase_all(gamma);
  // closed and stabilized edges may overlap gamma; drop only what is left
  for (const EdgeSet* rem : {&closed1, &stabilized, &closed2})
    rem->for_each_edge([&](Edge e) {
      if (open.contains(e)) open.erase(e);
    });

  if (!(taken == after.taken))
    return fail(set_divergence("advanced taken", taken, after.taken));
  if (!(kept == after.kept))
    return fail(set_divergence("advanced kept", kept, after.kept));
  if (!(open == after.open))
    return fail(set_divergence("advanced open", open, after.open));
  if (after.step != i + 1)
    return fail("advanced step index differs: expected " + std::to_string(i + 1) +
                ", got " + std::to_string(after.step));

  OracleResult ok;
  ok.pass = true;
  return ok;
}

size_t triangle_count(const EdgeSet& g) {
  size_t total = 0;
  g.for_each_edge([&](Edge e) {
    auto ru = g.row(e.u);
    auto rv = g.row(e.v);
    size_t start = e.v >> 6;
    uint64_t first = (ru[start] & rv[start]) & ~((2ULL << (e.v & 63)) - 1);
    total += std::popcount(first);
    for (size_t w = start + 1; w < ru.size(); ++w)
      total += std::popcount(ru[w] & rv[w]);
  });
  return total;
}

namespace {

// Maximum clique with a greedy-coloring bound; vertices live in one word.
struct CliqueSolver {
  std::vector<uint64_t> adj;
  int best = 0;

  void expand(uint64_t cand, int size) {
    if (!cand) {
      best = std::max(best, size);
      return;
    }
    int verts[64], colors[64], m = 0, color = 0;
    uint64_t left = cand;
    while (left) {
      ++color;
      uint64_t cls = left;
      while (cls) {
        int v = std::countr_zero(cls);
        verts[m] = v;
        colors[m] = color;
        ++m;
        left &= ~(1ULL << v);
        cls &= ~(1ULL << v);
        cls &= ~adj[v];
      }
    }
    for (int k = m - 1; k >= 0; --k) {
      if (size + colors[k] <= best) return;
      int v = verts[k];
      expand(cand & adj[v], size + 1);
      cand &= ~(1ULL << v);
    }
  }
};

}  // namespace

int independence_exact(const EdgeSet& g) {
  uint32_t n = g.vertex_count();
  if (n > 60) throw std::invalid_argument("independence_exact: capped at 60 vertices");
  if (n == 0) return 0;
  CliqueSolver solver;
  solver.adj.assign(n, 0);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v)
      if (!g.contains(u, v)) {
        solver.adj[u] |= 1ULL << v;
        solver.adj[v] |= 1ULL << u;
      }
  solver.expand((1ULL << n) - 1, 0);
  return solver.best;
}

WitnessRateReport independence_witness_rate(const EdgeSet& g, size_t set_size,
                                            uint64_t samples, uint64_t seed) {
  uint32_t n = g.vertex_count();
  if (set_size < 1 || set_size > n)
    throw std::invalid_argument("independence_witness_rate: bad set size");
  if (samples < 1)
    throw std::invalid_argument("independence_witness_rate: need at least one sample");
  WitnessRateReport rep;
  rep.set_size = set_size;
  rep.samples = samples;
  std::vector<uint32_t> perm(n);
  uint64_t hits = 0;
  for (uint64_t t = 0; t < samples; ++t) {
    rng::Sequence seq(seed, 0, Stream::Audit, t);
    std::iota(perm.begin(), perm.end(), 0u);
    for (size_t k = 0; k < set_size; ++k) {
      size_t j = k + seq.next_below(n - k);
      std::swap(perm[k], perm[j]);
    }
    bool independent = true;
    for (size_t a = 1; a < set_size && independent; ++a)
      for (size_t b = 0; b < a; ++b)
        if (g.contains(perm[a], perm[b])) {
          independent = false;
          break;
        }
    hits += independent ? 1 : 0;
  }
  rep.rate = static_cast<double>(hits) / samples;
  rep.standard_error = std::sqrt(rep.rate * (1.0 - rep.rate) / samples);
  return rep;
}

EqualizationReport equalization_test(const GraphState& state, const Schedule& sched,
                                     Edge e, uint64_t trials, uint64_t seed,
                                     int threads) {
  uint32_t n = state.vertex_count();
  if (sched.n != n)
    throw std::invalid_argument("equalization_test: schedule is for a different n");
  if (!state.open.contains(e))
    throw std::invalid_argument("equalization_test: probe edge is not open");
  if (state.step >= static_cast<uint32_t>(sched.steps))
    throw std::invalid_argument("equalization_test: state is already past the schedule");
  if (trials < 1) throw std::invalid_argument("equalization_test: need trials");

  int i = static_cast<int>(state.step);
  std::vector<Edge> closers = mixed_codegree_edges(state, e.u, e.v);
  double y = static_cast<double>(closers.size());
  double ph = stabilization_prob(sched, i, y);

  EqualizationReport rep;
  rep.trials = trials;
  rep.mixed = closers.size();
  rep.target = std::pow(1.0 - sched.p, std::max(sched.closure_threshold(i), y));

  size_t workers = threads < 1 ? 1 : static_cast<size_t>(threads);
  workers = std::min<size_t>(workers, trials);
  std::vector<uint64_t> survived(std::max<size_t>(workers, 1), 0);
  parallel_chunks(trials, threads, [&](size_t c, size_t lo, size_t hi) {
    uint64_t cnt = 0;
    for (uint64_t t = lo; t < hi; ++t) {
      uint64_t st = rng::derive_seed(seed, t);
      bool closed = false;
      for (Edge f : closers)
        if (rng::draw(st, i, Stream::Gamma, edge_index(f, n)) < sched.p) {
          closed = true;
          break;
        }
      if (!closed && rng::draw(st, i, Stream::Stab, edge_index(e, n)) >= ph) ++cnt;
    }
    survived[c] = cnt;
  });
  uint64_t total = std::accumulate(survived.begin(), survived.end(), uint64_t{0});
  rep.frequency = static_cast<double>(total) / trials;
  rep.band = 4.0 * std::sqrt(rep.target * (1.0 - rep.target) / trials);
  rep.pass = std::abs(rep.frequency - rep.target) <= rep.band;
  return rep;
}

namespace {

size_t masked_pair_count(const EdgeSet& s, const std::vector<uint32_t>& a,
                         const std::vector<uint64_t>& mb) {
  size_t c = 0;
  for (uint32_t v : a) c += EdgeSet::common_count(s.row(v), mb);
  return c;
}

}  // namespace

DensityReport edge_density_test(const EdgeSet& kept, const EdgeSet& open0,
                                long long s, double delta, double gamma,
                                int pairs, uint64_t seed, int threads) {
  uint32_t n = kept.vertex_count();
  if (open0.vertex_count() != n)
    throw std::invalid_argument("edge_density_test: vertex count mismatch");
  if (s < 1 || 2 * s > n) throw std::invalid_argument("edge_density_test: bad set size");
  if (pairs < 1) throw std::invalid_argument("edge_density_test: need pairs");
  if (!(delta > 0.0)) throw std::invalid_argument("edge_density_test: delta must be positive");
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("edge_density_test: gamma must be in (0,1]");
  if (open0.empty()) throw std::invalid_argument("edge_density_test: empty base graph");

  DensityReport rep;
  rep.delta = delta;
  rep.pairs_requested = pairs;
  rep.rho_emp = static_cast<double>(kept.edge_count()) / open0.edge_count();

  struct P {
    std::vector<uint32_t> a;
    std::vector<uint64_t> mb;
    size_t base = 0;
  };
  std::vector<P> accepted;
  size_t words = (n + 63) / 64;
  double need = gamma * static_cast<double>(s) * static_cast<double>(s);
  uint64_t attempts = 0, cap = static_cast<uint64_t>(pairs) * 200;
  std::vector<uint32_t> perm(n);
  while (accepted.size() < static_cast<size_t>(pairs) && attempts < cap) {
    rng::Sequence seq(seed, 0, Stream::Audit, attempts++);
    std::iota(perm.begin(), perm.end(), 0u);
    for (size_t k = 0; k < 2 * static_cast<size_t>(s); ++k) {
      size_t j = k + seq.next_below(n - k);
      std::swap(perm[k], perm[j]);
    }
    P p;
    p.a.assign(perm.begin(), perm.begin() + s);
    p.mb.assign(words, 0);
    for (size_t k = s; k < 2 * static_cast<size_t>(s); ++k)
      p.mb[perm[k] >> 6] |= 1ULL << (perm[k] & 63);
    p.base = masked_pair_count(open0, p.a, p.mb);
    if (static_cast<double>(p.base) >= need) accepted.push_back(std::move(p));
  }
  rep.pairs_accepted = static_cast<int>(accepted.size());
  rep.ratios.assign(accepted.size(), 0.0);
  parallel_chunks(accepted.size(), threads, [&](size_t, size_t lo, size_t hi) {
    for (size_t k = lo; k < hi; ++k)
      rep.ratios[k] = static_cast<double>(masked_pair_count(kept, accepted[k].a,
                                                            accepted[k].mb)) /
                      accepted[k].base;
  });
  size_t within = 0;
  for (double r : rep.ratios)
    if (r >= (1.0 - delta) * rep.rho_emp && r <= (1.0 + delta) * rep.rho_emp) ++within;
  rep.fraction_within =
      accepted.empty() ? 0.0 : static_cast<double>(within) / accepted.size();
  return rep;
}

}  // namespace nibblepack
