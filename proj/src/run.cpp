#include "nibblepack/run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nibblepack/parallel.hpp"
#include "nibblepack/rng.hpp"

namespace nibblepack {

namespace {

size_t max_degree(const EdgeSet& s) {
  size_t m = 0;
  for (uint32_t v = 0; v < s.vertex_count(); ++v) m = std::max(m, s.degree(v));
  return m;
}

void pair_codegree_extremes(const GraphState& g, int threads, size_t& max_x,
                            size_t& max_y, size_t& max_z) {
  uint32_t n = g.vertex_count();
  size_t workers = threads < 1 ? 1 : std::min<size_t>(threads, n ? n : 1);
  std::vector<size_t> xs(workers, 0), ys(workers, 0), zs(workers, 0);
  parallel_chunks(n, threads, [&](size_t c, size_t lo, size_t hi) {
    size_t mx = 0, my = 0, mz = 0;
    for (uint32_t u = static_cast<uint32_t>(lo); u < hi; ++u)
      for (uint32_t v = u + 1; v < n; ++v) {
        mx = std::max(mx, open_codegree(g, u, v));
        my = std::max(my, mixed_codegree(g, u, v));
        mz = std::max(mz, taken_codegree(g, u, v));
      }
    xs[c] = mx;
    ys[c] = my;
    zs[c] = mz;
  });
  max_x = *std::max_element(xs.begin(), xs.end());
  max_y = *std::max_element(ys.begin(), ys.end());
  max_z = *std::max_element(zs.begin(), zs.end());
}

TrajectoryRecord snapshot(const GraphState& g, const Schedule& sched,
                          const RunOptions& opts) {
  TrajectoryRecord r;
  r.step = g.step;
  r.open_count = g.open.edge_count();
  r.kept_count = g.kept.edge_count();
  r.taken_count = g.taken.edge_count();
  r.predicted_open_fraction = sched.q[g.step];
  r.predicted_density = sched.pi[g.step] / std::sqrt(static_cast<double>(sched.n));
  r.max_open_degree = max_degree(g.open);
  if (opts.track_extremes) {
    size_t mx = 0;
    pair_codegree_extremes(g, opts.threads, mx, r.max_mixed_codegree, r.max_codegree);
  }
  return r;
}

}  // namespace

RunResult run(const EdgeSet& host, const Schedule& sched, uint64_t seed,
              const RunOptions& opts) {
  if (host.vertex_count() != sched.n)
    throw std::invalid_argument("run: host/schedule vertex count mismatch");
  RunResult res;
  GraphState g = make_start(host);
  res.trajectories.reserve(sched.steps + 1);
  res.trajectories.push_back(snapshot(g, sched, opts));
  if (opts.retain_states) res.states.push_back(g);
  for (int i = 0; i < sched.steps; ++i) {
    StepSample s = advance(g, sched, seed, opts.threads);
    res.trajectories.push_back(snapshot(g, sched, opts));
    if (opts.retain_samples) res.samples.push_back(std::move(s));
    if (opts.retain_states) res.states.push_back(g);
  }
  res.G = std::move(g.kept);
  return res;
}

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

struct SampledPair {
  std::vector<uint32_t> a, b;
  std::vector<uint64_t> mb;  // bitmask of b
  size_t base_open = 0;      // |O_0(A,B)|
};

std::vector<uint64_t> make_mask(const std::vector<uint32_t>& vs, uint32_t n) {
  std::vector<uint64_t> mask((n + 63) / 64, 0);
  for (uint32_t v : vs) mask[v >> 6] |= 1ULL << (v & 63);
  return mask;
}

size_t masked_count(const EdgeSet& s, const std::vector<uint32_t>& a,
                    const std::vector<uint64_t>& mb) {
  size_t c = 0;
  for (uint32_t v : a) c += EdgeSet::common_count(s.row(v), mb);
  return c;
}

SampledPair draw_pair(uint32_t n, size_t size, uint64_t seed, uint64_t index) {
  rng::Sequence seq(seed, 0, Stream::Audit, index);
  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (size_t k = 0; k < 2 * size; ++k) {
    size_t j = k + seq.next_below(n - k);
    std::swap(perm[k], perm[j]);
  }
  SampledPair p;
  p.a.assign(perm.begin(), perm.begin() + size);
  p.b.assign(perm.begin() + size, perm.begin() + 2 * size);
  std::sort(p.a.begin(), p.a.end());
  std::sort(p.b.begin(), p.b.end());
  p.mb = make_mask(p.b, n);
  return p;
}

}  // namespace

AuditReport audit_events(const std::vector<GraphState>& history,
                         const std::vector<StepSample>& samples,
                         const Schedule& sched, const AuditOptions& opts) {
  if (history.empty()) throw std::invalid_argument("audit_events: empty history");
  if (opts.budget < 1) throw std::invalid_argument("audit_events: budget must be >= 1");
  uint32_t n = history[0].vertex_count();
  if (2 * sched.s > n)
    throw std::invalid_argument("audit_events: infeasible, s exceeds n/2");
  int last = static_cast<int>(history.size()) - 1;
  double logn = std::log(static_cast<double>(n));
  double sqrtn = std::sqrt(static_cast<double>(n));

  AuditReport rep;
  rep.seed = opts.seed;
  rep.budget = opts.budget;

  // Dense disjoint pairs of size s for the two-sided open/kept events.
  // Pair index doubles as the rejection-sampling attempt counter.
  std::vector<SampledPair> dense_pairs;
  {
    double need = sched.gamma * static_cast<double>(sched.s) * sched.s;
    uint64_t attempts = 0, cap = static_cast<uint64_t>(opts.budget) * 200;
    while (dense_pairs.size() < static_cast<size_t>(opts.budget) && attempts < cap) {
      SampledPair p = draw_pair(n, sched.s, opts.seed, attempts++);
      p.base_open = masked_count(history[0].open, p.a, p.mb);
      if (static_cast<double>(p.base_open) >= need) dense_pairs.push_back(std::move(p));
    }
    if (dense_pairs.empty()) {
      AuditCheck c;
      c.name = "pair-open";
      c.scope = "all steps";
      c.bound_desc = "no sampled pair met the density floor gamma*s^2 = " + num(need);
      c.relation = "<=";
      c.verdict = "report-only";
      c.witnesses.push_back("skipped: no qualifying (A,B) pairs in " +
                            std::to_string(opts.budget * 200) + " attempts");
      rep.checks.push_back(std::move(c));
    }
  }

  // Small pairs of size s0; these have no density restriction.
  std::vector<SampledPair> small_pairs;
  if (sched.s0_feasible) {
    for (int k = 0; k < opts.budget; ++k)
      small_pairs.push_back(draw_pair(n, sched.s0, opts.seed + 1, k));
  } else {
    AuditCheck c;
    c.name = "small-pair-open";
    c.scope = "all steps";
    c.bound_desc = "audit infeasible at this scale: floor(sigma^4*q_I^2*s) < 1";
    c.relation = "<=";
    c.verdict = "report-only";
    rep.checks.push_back(std::move(c));
  }

  for (int i = 0; i <= last; ++i) {
    const GraphState& g = history[i];
    std::string scope = "step " + std::to_string(i);
    double qi = sched.q[i];
    double pii = sched.pi[i];

    {
      auto violations = check_state_soundness(g);
      AuditCheck c;
      c.name = "state-soundness";
      c.scope = scope;
      c.bound_desc = "all state invariants hold";
      c.relation = "<=";
      c.bound = 0.0;
      c.observed = static_cast<double>(violations.size());
      c.within = violations.empty();
      c.verdict = violations.empty() ? "pass" : "fail";
      for (size_t k = 0; k < violations.size() && k < 5; ++k) {
        const auto& v = violations[k];
        c.witnesses.push_back(v.kind + " (" + std::to_string(v.u) + "," +
                              std::to_string(v.v) + "," + std::to_string(v.w) + ")");
      }
      rep.checks.push_back(std::move(c));
    }

    {
      AuditCheck c;
      c.name = "open-degree";
      c.scope = scope;
      c.bound = qi * n;
      c.bound_desc = "q_i*n = " + num(c.bound);
      c.relation = "<=";
      c.observed = static_cast<double>(max_degree(g.open));
      c.within = c.observed <= c.bound;
      c.verdict = "report-only";
      rep.checks.push_back(std::move(c));
    }

    if (i >= 1 && static_cast<size_t>(i) <= samples.size()) {
      AuditCheck c;
      c.name = "gamma-degree";
      c.scope = scope;
      c.bound = 2.0 * sched.sigma * sched.q[i - 1] * sqrtn;
      c.bound_desc = "2*sigma*q_{i-1}*sqrt(n) = " + num(c.bound);
      c.relation = "<=";
      c.observed = static_cast<double>(max_degree(samples[i - 1].gamma));
      c.within = c.observed <= c.bound;
      c.verdict = "report-only";
      rep.checks.push_back(std::move(c));
    }

    {
      size_t mx = 0, my = 0, mz = 0;
      pair_codegree_extremes(g, opts.threads, mx, my, mz);
      AuditCheck cx;
      cx.name = "open-codegree";
      cx.scope = scope;
      cx.bound = qi * qi * n;
      cx.bound_desc = "q_i^2*n = " + num(cx.bound);
      cx.relation = "<=";
      cx.observed = static_cast<double>(mx);
      cx.within = cx.observed <= cx.bound;
      cx.verdict = "report-only";
      rep.checks.push_back(std::move(cx));

      AuditCheck cy;
      cy.name = "mixed-codegree";
      cy.scope = scope;
      cy.bound = 2.0 * qi * pii * sqrtn;
      cy.bound_desc = "2*q_i*pi_i*sqrt(n) = " + num(cy.bound);
      cy.relation = "<=";
      cy.observed = static_cast<double>(my);
      cy.within = cy.observed <= cy.bound;
      cy.verdict = "report-only";
      rep.checks.push_back(std::move(cy));

      AuditCheck cz;
      cz.name = "taken-codegree";
      cz.scope = scope;
      cz.bound = i * std::pow(logn, 9.0);
      cz.bound_desc = "i*(log n)^9 = " + num(cz.bound);
      cz.relation = "<=";
      cz.observed = static_cast<double>(mz);
      cz.within = cz.observed <= cz.bound;
      cz.verdict = "report-only";
      rep.checks.push_back(std::move(cz));

      AuditCheck ct;
      ct.name = "taken-codegree-tight";
      ct.scope = scope;
      ct.bound = logn * logn;
      ct.bound_desc = "(log n)^2 = " + num(ct.bound);
      ct.relation = "<=";
      ct.observed = static_cast<double>(mz);
      ct.within = ct.observed <= ct.bound;
      ct.verdict = "report-only";
      rep.checks.push_back(std::move(ct));
    }

    if (!small_pairs.empty()) {
      std::vector<size_t> counts(small_pairs.size(), 0);
      parallel_chunks(small_pairs.size(), opts.threads,
                      [&](size_t, size_t lo, size_t hi) {
                        for (size_t k = lo; k < hi; ++k)
                          counts[k] = masked_count(g.open, small_pairs[k].a,
                                                   small_pairs[k].mb);
                      });
      AuditCheck c;
      c.name = "small-pair-open";
      c.scope = scope;
      c.bound = qi * static_cast<double>(sched.s0) * static_cast<double>(sched.s0);
      c.bound_desc = "q_i*s0^2 = " + num(c.bound);
      c.relation = "<=";
      c.observed = static_cast<double>(*std::max_element(counts.begin(), counts.end()));
      c.within = c.observed <= c.bound;
      c.verdict = "report-only";
      rep.checks.push_back(std::move(c));
    }

    if (!dense_pairs.empty()) {
      std::vector<size_t> counts(dense_pairs.size(), 0);
      parallel_chunks(dense_pairs.size(), opts.threads,
                      [&](size_t, size_t lo, size_t hi) {
                        for (size_t k = lo; k < hi; ++k)
                          counts[k] = masked_count(g.open, dense_pairs[k].a,
                                                   dense_pairs[k].mb);
                      });
      double max_upper = 0.0, min_lower = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < dense_pairs.size(); ++k) {
        double ratio = static_cast<double>(counts[k]) / dense_pairs[k].base_open;
        max_upper = std::max(max_upper, ratio);
        min_lower = std::min(min_lower, ratio);
      }
      AuditCheck up;
      up.name = "pair-open-upper";
      up.scope = scope;
      up.bound = qi;
      up.bound_desc = "|O_i(A,B)|/|O_0(A,B)| <= q_i = " + num(qi);
      up.relation = "<=";
      up.observed = max_upper;
      up.within = up.observed <= up.bound;
      up.verdict = "report-only";
      rep.checks.push_back(std::move(up));

      AuditCheck lo;
      lo.name = "pair-open-lower";
      lo.scope = scope;
      lo.bound = sched.tau[i] * qi;
      lo.bound_desc = "|O_i(A,B)|/|O_0(A,B)| >= tau_i*q_i = " + num(lo.bound);
      lo.relation = ">=";
      lo.observed = min_lower;
      lo.within = lo.observed >= lo.bound;
      lo.verdict = "report-only";
      rep.checks.push_back(std::move(lo));
    }
  }

  // Final kept-density homogeneity, only meaningful on a complete history.
  if (last == sched.steps && !dense_pairs.empty()) {
    const EdgeSet& kept = history[last].kept;
    std::vector<size_t> counts(dense_pairs.size(), 0);
    parallel_chunks(dense_pairs.size(), opts.threads,
                    [&](size_t, size_t lo, size_t hi) {
                      for (size_t k = lo; k < hi; ++k)
                        counts[k] =
                            masked_count(kept, dense_pairs[k].a, dense_pairs[k].mb);
                    });
    double max_ratio = 0.0, min_ratio = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < dense_pairs.size(); ++k) {
      double ratio = static_cast<double>(counts[k]) / dense_pairs[k].base_open;
      max_ratio = std::max(max_ratio, ratio);
      min_ratio = std::min(min_ratio, ratio);
    }
    size_t base_total = history[0].open.edge_count();
    double rho_emp =
        base_total ? static_cast<double>(kept.edge_count()) / base_total : 0.0;
    struct Band {
      const char* name;
      double rho;
    };
    for (const Band& band : {Band{"kept-pair", sched.rho}, Band{"kept-pair-emp", rho_emp}}) {
      AuditCheck lo;
      lo.name = std::string(band.name) + "-lower";
      lo.scope = "final";
      lo.bound = (1.0 - sched.delta) * band.rho;
      lo.bound_desc = "|F_I(A,B)|/|O_0(A,B)| >= (1-delta)*rho = " + num(lo.bound);
      lo.relation = ">=";
      lo.observed = min_ratio;
      lo.within = lo.observed >= lo.bound;
      lo.verdict = "report-only";
      rep.checks.push_back(std::move(lo));

      AuditCheck up;
      up.name = std::string(band.name) + "-upper";
      up.scope = "final";
      up.bound = (1.0 + sched.delta) * band.rho;
      up.bound_desc = "|F_I(A,B)|/|O_0(A,B)| <= (1+delta)*rho = " + num(up.bound);
      up.relation = "<=";
      up.observed = max_ratio;
      up.within = up.observed <= up.bound;
      up.verdict = "report-only";
      rep.checks.push_back(std::move(up));
    }
  }

  return rep;
}

}  // namespace nibblepack
