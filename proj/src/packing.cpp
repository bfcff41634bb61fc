#include "nibblepack/packing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nibblepack/rng.hpp"
#include "nibblepack/verifier.hpp"

namespace nibblepack {

namespace {

struct VertexPair {
  std::vector<uint32_t> a;
  std::vector<uint64_t> mb;  // bitmask of the second set
  size_t base = 0;
};

VertexPair sample_pair(uint32_t n, size_t size, uint64_t seed, uint64_t index) {
  rng::Sequence seq(seed, 0, Stream::Audit, index);
  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (size_t k = 0; k < 2 * size; ++k) {
    size_t j = k + seq.next_below(n - k);
    std::swap(perm[k], perm[j]);
  }
  VertexPair p;
  p.a.assign(perm.begin(), perm.begin() + size);
  p.mb.assign((n + 63) / 64, 0);
  for (size_t k = size; k < 2 * size; ++k)
    p.mb[perm[k] >> 6] |= 1ULL << (perm[k] & 63);
  return p;
}

size_t pair_count(const EdgeSet& g, const VertexPair& p) {
  size_t c = 0;
  for (uint32_t v : p.a) c += EdgeSet::common_count(g.row(v), p.mb);
  return c;
}

}  // namespace

PackingResult pack(const EdgeSet& host, double eps, double xi, double C0,
                   uint64_t seed, const ScheduleOverrides& ov, const PackOptions& po) {
  uint32_t n = host.vertex_count();
  ScheduleOverrides eff = ov;
  if (!eff.eps) eff.eps = eps;
  if (!eff.xi) eff.xi = xi;
  if (!eff.C0) eff.C0 = C0;
  Schedule sched = build_schedule(n, eff);

  PackingResult res;
  res.schedule = sched;
  res.host_edges = host.edge_count();
  int rounds = static_cast<int>(
      std::ceil(std::log(1.0 / sched.eps) / (sched.rho * (1.0 - sched.delta))));
  if (rounds < 1) rounds = 1;
  res.rounds_planned = static_cast<uint32_t>(rounds);
  res.constants.delta = sched.delta;
  res.constants.gamma = sched.gamma;
  res.constants.beta = sched.beta;
  res.constants.C = sched.C;
  res.constants.C1 = sched.C1;
  res.constants.s = sched.s;
  res.constants.s_capped = sched.s_capped;
  res.constants.I_outer = rounds;

  // Advisory host-uniformity precondition on sampled pairs.
  if (po.precondition_pairs > 0) {
    long long t = static_cast<long long>(
        std::ceil(sched.C0 * std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)))));
    if (2 * t > n) t = n / 2;
    if (t < 1) t = 1;
    uint64_t pre_seed = rng::derive_seed(seed, 101);
    double min_density = std::numeric_limits<double>::infinity();
    for (int k = 0; k < po.precondition_pairs; ++k) {
      VertexPair p = sample_pair(n, static_cast<size_t>(t), pre_seed, k);
      double density = static_cast<double>(pair_count(host, p)) /
                       (static_cast<double>(t) * static_cast<double>(t));
      min_density = std::min(min_density, density);
    }
    res.sampled_min_uniformity = min_density;
    if (min_density < sched.xi)
      res.warnings.push_back(
          "host uniformity below xi on sampled pairs: min density " +
          std::to_string(min_density) + " < " + std::to_string(sched.xi));
  }

  // Fixed pairs tracked across rounds for the leftover-density bracket.
  std::vector<VertexPair> diag;
  if (po.diagnostic_pairs > 0 && 2 * sched.s <= n) {
    uint64_t dseed = rng::derive_seed(seed, 202);
    double need = sched.gamma * static_cast<double>(sched.s) * static_cast<double>(sched.s);
    uint64_t attempts = 0, cap = static_cast<uint64_t>(po.diagnostic_pairs) * 200;
    while (diag.size() < static_cast<size_t>(po.diagnostic_pairs) && attempts < cap) {
      VertexPair p = sample_pair(n, static_cast<size_t>(sched.s), dseed, attempts++);
      p.base = pair_count(host, p);
      if (p.base > 0 && static_cast<double>(p.base) >= need) diag.push_back(std::move(p));
    }
    if (diag.empty() && res.host_edges > 0)
      res.warnings.push_back(
          "no sampled vertex-set pair met the density floor; decay diagnostics skipped");
  }

  EdgeSet current = host;
  RunOptions ro;
  ro.threads = po.threads;
  ro.track_extremes = po.track_extremes;
  int consecutive_empty = 0;
  for (uint32_t k = 0; k < res.rounds_planned; ++k) {
    RoundStat st;
    st.round = k;
    st.host_edges_before = current.edge_count();
    RunResult rr = run(current, sched, seed ^ k, ro);
    st.produced_edges = rr.G.edge_count();
    res.per_round.push_back(st);
    res.round_trajectories.push_back(std::move(rr.trajectories));
    current.erase_all(rr.G);
    res.graphs.push_back(std::move(rr.G));
    for (size_t d = 0; d < diag.size(); ++d) {
      InvariantDiagnostic id;
      id.round = k + 1;
      id.pair = static_cast<uint32_t>(d);
      id.ratio = static_cast<double>(pair_count(current, diag[d])) / diag[d].base;
      id.lower = std::pow(1.0 - (1.0 + sched.delta) * sched.rho, k + 1.0);
      id.upper = std::pow(1.0 - (1.0 - sched.delta) * sched.rho, k + 1.0);
      id.within = id.ratio >= id.lower && id.ratio <= id.upper;
      res.invariant_diagnostics.push_back(id);
    }
    if (st.produced_edges == 0) {
      if (++consecutive_empty >= 2) {
        res.stopped_early = true;
        break;
      }
    } else {
      consecutive_empty = 0;
    }
  }
  res.leftover = std::move(current);
  res.covered_edges = res.host_edges - res.leftover.edge_count();
  res.coverage = res.host_edges
                     ? static_cast<double>(res.covered_edges) / res.host_edges
                     : 1.0;
  return res;
}

PackingResult pack_complete(uint32_t n, double eps, uint64_t seed,
                            const ScheduleOverrides& ov, const PackOptions& po) {
  return pack(complete_graph(n), eps, 1.0, 1.0, seed, ov, po);
}

Srk3Report srk3_demo(uint32_t r, double A, uint64_t seed,
                     const ScheduleOverrides& ov, const PackOptions& po) {
  if (r < 2) throw std::invalid_argument("srk3_demo: r must be at least 2");
  if (!(A > 0.0)) throw std::invalid_argument("srk3_demo: A must be positive");
  double nr = std::floor(A * static_cast<double>(r) * r * std::log(static_cast<double>(r)));
  if (!(nr >= 3.0))
    throw std::invalid_argument("srk3_demo: fewer than 3 vertices, increase A or r");

  Srk3Report rep;
  rep.vertices = static_cast<uint32_t>(nr);
  rep.target = rep.vertices / r;
  rep.packing = pack_complete(rep.vertices, 0.5, seed, ov, po);
  PackingResult& pk = rep.packing;

  if (pk.graphs.size() > r) {
    pk.warnings.push_back("keeping the first " + std::to_string(r) + " of " +
                          std::to_string(pk.graphs.size()) + " rounds");
    pk.graphs.resize(r, EdgeSet(rep.vertices));
  } else if (pk.graphs.size() < r) {
    pk.warnings.push_back("only " + std::to_string(pk.graphs.size()) +
                          " rounds ran; padding with empty graphs");
    pk.graphs.resize(r, EdgeSet(rep.vertices));
  }
  EdgeSet leftover = complete_graph(rep.vertices);
  for (const EdgeSet& g : pk.graphs) leftover.erase_all(g);
  pk.leftover = std::move(leftover);
  pk.covered_edges = pk.host_edges - pk.leftover.edge_count();
  pk.coverage = pk.host_edges
                    ? static_cast<double>(pk.covered_edges) / pk.host_edges
                    : 1.0;

  bool warned_target = false;
  for (uint32_t i = 0; i < r; ++i) {
    WitnessEntry w;
    w.graph_index = i;
    w.target = rep.target;
    if (rep.vertices <= 60) {
      w.exact = true;
      w.alpha = independence_exact(pk.graphs[i]);
      w.below_target = w.alpha < static_cast<int>(rep.target);
    } else if (rep.target >= 1) {
      WitnessRateReport wr = independence_witness_rate(
          pk.graphs[i], rep.target, 2000, rng::derive_seed(seed, 700 + i));
      w.witness_rate = wr.rate;
      w.standard_error = wr.standard_error;
      w.below_target = wr.rate == 0.0;
    } else if (!warned_target) {
      pk.warnings.push_back("independence target is zero; witness sampling skipped");
      warned_target = true;
    }
    rep.witnesses.push_back(w);
  }
  return rep;
}

HandshakeReport handshake_check(const EdgeSet& host, size_t sub_size,
                                size_t super_size, uint64_t samples, uint64_t seed) {
  uint32_t n = host.vertex_count();
  if (super_size < 1 || 2 * super_size > n)
    throw std::invalid_argument("handshake_check: super size must satisfy 2s <= n");
  if (sub_size < 1 || sub_size > super_size)
    throw std::invalid_argument("handshake_check: need 1 <= t <= s");
  if (samples < 1) throw std::invalid_argument("handshake_check: need samples");

  HandshakeReport rep;
  rep.samples = samples;
  rep.super_size = super_size;
  rep.sub_size = sub_size;

  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  rng::Sequence seq(seed, 0, Stream::Audit, 0);
  for (size_t k = 0; k < 2 * super_size; ++k) {
    size_t j = k + seq.next_below(n - k);
    std::swap(perm[k], perm[j]);
  }
  std::vector<uint32_t> a(perm.begin(), perm.begin() + super_size);
  std::vector<uint32_t> b(perm.begin() + super_size, perm.begin() + 2 * super_size);
  rep.edges_super = edges_between(host, a, b);
  rep.expected = static_cast<double>(rep.edges_super) * sub_size * sub_size /
                 (static_cast<double>(super_size) * super_size);

  double sum = 0.0, sumsq = 0.0;
  std::vector<uint32_t> ta = a, tb = b;
  for (uint64_t k = 0; k < samples; ++k) {
    rng::Sequence s2(seed, 0, Stream::Audit, k + 1);
    for (size_t j = 0; j < sub_size; ++j) {
      size_t m = j + s2.next_below(super_size - j);
      std::swap(ta[j], ta[m]);
    }
    for (size_t j = 0; j < sub_size; ++j) {
      size_t m = j + s2.next_below(super_size - j);
      std::swap(tb[j], tb[m]);
    }
    double c = static_cast<double>(
        edges_between(host, std::span<const uint32_t>(ta.data(), sub_size),
                      std::span<const uint32_t>(tb.data(), sub_size)));
    sum += c;
    sumsq += c * c;
  }
  rep.mean = sum / samples;
  double var = samples > 1
                   ? std::max(0.0, (sumsq - sum * sum / samples) / (samples - 1))
                   : 0.0;
  rep.sd = std::sqrt(var);
  rep.standard_error = rep.sd / std::sqrt(static_cast<double>(samples));
  rep.pass = std::abs(rep.mean - rep.expected) <= 4.0 * rep.standard_error + 1e-12;
  return rep;
}

}  // namespace nibblepack
