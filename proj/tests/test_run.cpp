#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nibblepack/run.hpp"
#include "nibblepack/verifier.hpp"

using namespace nibblepack;

namespace {

Schedule short_schedule(uint32_t n, double p, int steps) {
  ScheduleOverrides ov;
  ov.p = p;
  ov.steps = steps;
  return build_schedule(n, ov);
}

const AuditCheck* find_check(const AuditReport& r, const std::string& name,
                             const std::string& scope) {
  for (const auto& c : r.checks)
    if (c.name == name && c.scope == scope) return &c;
  return nullptr;
}

}  // namespace

TEST_SUITE("nibble-run") {

TEST_CASE("an empty host yields an empty graph and flat trajectories") {
  EdgeSet host(50);
  Schedule s = short_schedule(50, 0.1, 3);
  RunResult r = run(host, s, 9);
  CHECK(r.G.empty());
  REQUIRE(r.trajectories.size() == 4);
  for (const auto& t : r.trajectories) {
    CHECK(t.open_count == 0);
    CHECK(t.kept_count == 0);
    CHECK(t.max_open_degree == 0);
  }
}

TEST_CASE("a triangle host can never keep all three sides") {
  EdgeSet host(3);
  host.insert(0, 1);
  host.insert(1, 2);
  host.insert(0, 2);
  ScheduleOverrides ov;
  ov.p = 1.0;  // every open edge sampled at once, conflicts guaranteed
  ov.steps = 2;
  Schedule s = build_schedule(3, ov);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    RunResult r = run(host, s, seed);
    CHECK(triangle_count(r.G) == 0);
    CHECK(r.G.edge_count() <= 2);
    CHECK(r.G.is_subset_of(host));
  }
}

TEST_CASE("trajectories record counts, predictions, and extremes") {
  const uint32_t n = 48;
  EdgeSet host = complete_graph(n);
  Schedule s = short_schedule(n, 0.05, 3);
  RunOptions opts;
  opts.retain_states = true;
  opts.retain_samples = true;
  RunResult r = run(host, s, 31, opts);

  REQUIRE(r.trajectories.size() == static_cast<size_t>(s.steps) + 1);
  REQUIRE(r.states.size() == static_cast<size_t>(s.steps) + 1);
  REQUIRE(r.samples.size() == static_cast<size_t>(s.steps));

  CHECK(r.trajectories[0].open_count == host.edge_count());
  CHECK(r.trajectories[0].kept_count == 0);
  CHECK(r.trajectories[0].predicted_open_fraction == 1.0);

  for (int i = 0; i <= s.steps; ++i) {
    const auto& t = r.trajectories[i];
    const auto& st = r.states[i];
    CHECK(t.step == static_cast<uint32_t>(i));
    CHECK(t.open_count == st.open.edge_count());
    CHECK(t.kept_count == st.kept.edge_count());
    CHECK(t.taken_count == st.taken.edge_count());
    CHECK(t.predicted_open_fraction == s.q[i]);
    CHECK(t.predicted_density ==
          doctest::Approx(s.pi[i] / std::sqrt(double(n))).epsilon(1e-15));

    size_t want_deg = 0;
    for (uint32_t v = 0; v < n; ++v) want_deg = std::max(want_deg, st.open.degree(v));
    CHECK(t.max_open_degree == want_deg);

    size_t want_mixed = 0, want_co = 0;
    for (uint32_t u = 0; u < n; ++u)
      for (uint32_t v = u + 1; v < n; ++v) {
        want_mixed = std::max(want_mixed, mixed_codegree(st, u, v));
        want_co = std::max(want_co, taken_codegree(st, u, v));
      }
    CHECK(t.max_mixed_codegree == want_mixed);
    CHECK(t.max_codegree == want_co);

    if (i > 0) {
      CHECK(t.open_count <= r.trajectories[i - 1].open_count);
      CHECK(t.kept_count >= r.trajectories[i - 1].kept_count);
    }
  }
  CHECK(r.G == r.states.back().kept);

  // extreme tracking off zeroes the codegree columns but keeps degrees
  RunOptions lean;
  lean.track_extremes = false;
  RunResult r2 = run(host, s, 31, lean);
  CHECK(r2.trajectories.back().max_mixed_codegree == 0);
  CHECK(r2.trajectories.back().max_codegree == 0);
  CHECK(r2.trajectories.back().max_open_degree > 0);
  CHECK(r2.G == r.G);  // options do not perturb the randomness
}

TEST_CASE("runs are reproducible and thread-count independent") {
  EdgeSet host = complete_graph(64);
  Schedule s = short_schedule(64, 0.08, 3);
  RunOptions a, b;
  a.threads = 1;
  b.threads = 5;
  RunResult ra = run(host, s, 77, a);
  RunResult rb = run(host, s, 77, b);
  CHECK(ra.G == rb.G);
  REQUIRE(ra.trajectories.size() == rb.trajectories.size());
  for (size_t i = 0; i < ra.trajectories.size(); ++i) {
    CHECK(ra.trajectories[i].open_count == rb.trajectories[i].open_count);
    CHECK(ra.trajectories[i].max_mixed_codegree == rb.trajectories[i].max_mixed_codegree);
  }
  RunResult rc = run(host, s, 78, a);
  CHECK_FALSE(ra.G == rc.G);
}

TEST_CASE("audit passes on a sound run and covers the expected families") {
  const uint32_t n = 120;
  EdgeSet host = complete_graph(n);
  Schedule s = build_schedule(n);
  RunOptions opts;
  opts.retain_states = true;
  opts.retain_samples = true;
  RunResult r = run(host, s, 5, opts);

  AuditOptions ao;
  ao.budget = 8;
  ao.seed = 99;
  AuditReport rep = audit_events(r.states, r.samples, s, ao);
  CHECK(rep.hard_pass());
  CHECK(rep.seed == 99);
  CHECK(rep.budget == 8);

  // soundness is hard pass/fail at every retained step
  for (int i = 0; i <= s.steps; ++i) {
    const AuditCheck* c = find_check(rep, "state-soundness", "step " + std::to_string(i));
    REQUIRE(c != nullptr);
    CHECK(c->verdict == "pass");
  }

  // the asymptotic families are present and report-only
  for (const char* name : {"open-degree", "open-codegree", "mixed-codegree",
                           "taken-codegree", "pair-open-upper", "pair-open-lower"}) {
    const AuditCheck* c = find_check(rep, name, "step 1");
    REQUIRE(c != nullptr);
    CHECK(c->verdict == "report-only");
  }
  const AuditCheck* g1 = find_check(rep, "gamma-degree", "step 1");
  REQUIRE(g1 != nullptr);

  // step 0 open fraction on any pair is exactly 1 = q_0, so within
  const AuditCheck* p0 = find_check(rep, "pair-open-upper", "step 0");
  REQUIRE(p0 != nullptr);
  CHECK(p0->within);
  CHECK(p0->observed == 1.0);

  // final kept-density checks exist for a complete history
  CHECK(find_check(rep, "kept-pair-lower", "final") != nullptr);
  CHECK(find_check(rep, "kept-pair-emp-upper", "final") != nullptr);

  // without samples the gamma-degree family is skipped
  AuditReport lean = audit_events(r.states, {}, s, ao);
  CHECK(find_check(lean, "gamma-degree", "step 1") == nullptr);
  CHECK(lean.hard_pass());
}

TEST_CASE("audit flags a corrupted state as a hard failure") {
  const uint32_t n = 100;
  Schedule s = short_schedule(n, 0.05, 2);

  // a lone state whose only defect is a kept triangle
  GraphState g;
  g.open = EdgeSet(n);
  g.taken = EdgeSet(n);
  g.kept = EdgeSet(n);
  for (auto [x, y] : {std::pair<uint32_t, uint32_t>{0, 1}, {1, 2}, {0, 2}}) {
    g.taken.insert(x, y);
    g.kept.insert(x, y);
  }
  AuditReport rep = audit_events({g}, {}, s, {});
  CHECK_FALSE(rep.hard_pass());
  const AuditCheck* c = find_check(rep, "state-soundness", "step 0");
  REQUIRE(c != nullptr);
  CHECK(c->verdict == "fail");
  REQUIRE_FALSE(c->witnesses.empty());
  CHECK(c->witnesses[0].find("kept-triangle") != std::string::npos);

  // an open edge whose ends are joined through a taken path is also fatal
  GraphState h;
  h.open = EdgeSet(n);
  h.taken = EdgeSet(n);
  h.kept = EdgeSet(n);
  h.open.insert(0, 1);
  h.taken.insert(0, 2);
  h.taken.insert(1, 2);
  AuditReport rep2 = audit_events({h}, {}, s, {});
  CHECK_FALSE(rep2.hard_pass());
}

TEST_CASE("audit validates its inputs") {
  Schedule s = build_schedule(100);
  CHECK_THROWS_AS(audit_events({}, {}, s, {}), std::invalid_argument);

  GraphState g = make_start(complete_graph(100));
  AuditOptions zero;
  zero.budget = 0;
  CHECK_THROWS_AS(audit_events({g}, {}, s, zero), std::invalid_argument);

  // the schedule caps s at n/2, so disjoint pair sampling stays feasible
  // even under an oversized override
  ScheduleOverrides ov;
  ov.s = 80;
  Schedule tight = build_schedule(100, ov);
  CHECK(tight.s == 50);
  CHECK(audit_events({g}, {}, tight, {}).hard_pass());
}

}  // TEST_SUITE
