#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nibblepack/io.hpp"
#include "nibblepack/packing.hpp"
#include "nibblepack/rng.hpp"
#include "nibblepack/run.hpp"
#include "nibblepack/verifier.hpp"

namespace fs = std::filesystem;
using namespace nibblepack;

namespace {

int threads_from_env() {
  const char* env = std::getenv("NIBBLEPACK_THREADS");
  if (!env) return 1;
  try {
    int t = std::stoi(env);
    return t >= 1 ? t : 1;
  } catch (...) {
    return 1;
  }
}

bool apply_override(ScheduleOverrides& ov, const std::string& kv, std::string& err) {
  size_t eq = kv.find('=');
  if (eq == std::string::npos) {
    err = "override must be key=value, got \"" + kv + "\"";
    return false;
  }
  std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
  try {
    size_t pos = 0;
    if (key == "beta")
      ov.beta = std::stod(val, &pos);
    else if (key == "sigma")
      ov.sigma = std::stod(val, &pos);
    else if (key == "delta")
      ov.delta = std::stod(val, &pos);
    else if (key == "gamma")
      ov.gamma = std::stod(val, &pos);
    else if (key == "C")
      ov.C = std::stod(val, &pos);
    else if (key == "C0")
      ov.C0 = std::stod(val, &pos);
    else if (key == "eps")
      ov.eps = std::stod(val, &pos);
    else if (key == "xi")
      ov.xi = std::stod(val, &pos);
    else if (key == "p")
      ov.p = std::stod(val, &pos);
    else if (key == "steps")
      ov.steps = std::stoi(val, &pos);
    else if (key == "s")
      ov.s = std::stoll(val, &pos);
    else {
      err = "unknown override key \"" + key + "\"";
      return false;
    }
    if (pos != val.size()) throw std::invalid_argument("trailing");
  } catch (...) {
    err = "bad override value in \"" + kv + "\"";
    return false;
  }
  return true;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Hard artifact checks shared by pack/srk3: triangle-freeness, pairwise
// disjointness, and the exact edge partition against the host.
bool check_packing(const PackingResult& pr, const EdgeSet& host, std::string& why) {
  uint32_t n = host.vertex_count();
  EdgeSet acc(n);
  for (size_t i = 0; i < pr.graphs.size(); ++i) {
    const EdgeSet& g = pr.graphs[i];
    if (size_t t = triangle_count(g); t != 0) {
      why = "graph " + std::to_string(i) + " contains " + std::to_string(t) + " triangles";
      return false;
    }
    if (!g.is_subset_of(host)) {
      why = "graph " + std::to_string(i) + " is not a subgraph of the host";
      return false;
    }
    if (acc.intersects(g)) {
      why = "graph " + std::to_string(i) + " shares edges with an earlier graph";
      return false;
    }
    acc.insert_all(g);
  }
  if (acc.intersects(pr.leftover)) {
    why = "leftover shares edges with a produced graph";
    return false;
  }
  acc.insert_all(pr.leftover);
  if (!(acc == host)) {
    why = "graphs plus leftover do not partition the host edges";
    return false;
  }
  if (pr.covered_edges + pr.leftover.edge_count() != pr.host_edges) {
    why = "covered + leftover does not equal the host edge count";
    return false;
  }
  return true;
}

void write_packing_dir(const fs::path& dir, const PackingResult& pr,
                       const std::string& host_spec, uint64_t seed) {
  for (size_t i = 0; i < pr.graphs.size(); ++i)
    write_edge_list(dir / graph_file_name(i), pr.graphs[i]);
  write_edge_list(dir / "leftover.edges", pr.leftover);
  atomic_write(dir / "packing.json", packing_json_text(pr, host_spec, seed));
  for (size_t k = 0; k < pr.round_trajectories.size(); ++k)
    atomic_write(dir / ("trajectories_round_" + std::to_string(k) + ".csv"),
                 trajectory_csv(pr.round_trajectories[k]));
}

int run_params(uint32_t n, const ScheduleOverrides& ov, const std::string& out_dir) {
  Schedule sched = build_schedule(n, ov);
  std::string js = schedule_json_text(sched);
  std::string csv = schedule_csv(sched);
  if (!out_dir.empty()) {
    atomic_write(fs::path(out_dir) / "schedule.json", js);
    atomic_write(fs::path(out_dir) / "schedule.csv", csv);
  }
  std::cout << js << csv;
  return 0;
}

int run_nibble(const std::string& host_spec, uint32_t n, uint64_t seed,
               const ScheduleOverrides& ov, const std::string& out_dir, int threads,
               bool retain_samples, bool audit, int audit_budget) {
  EdgeSet host = load_host(host_spec, n, seed);
  Schedule sched = build_schedule(host.vertex_count(), ov);
  RunOptions opts;
  opts.threads = threads;
  opts.retain_samples = retain_samples;
  opts.retain_states = audit;
  RunResult rr = run(host, sched, seed, opts);

  size_t triangles = triangle_count(rr.G);
  bool subgraph = rr.G.is_subset_of(host);
  std::cout << "nibble: n=" << sched.n << " steps=" << sched.steps
            << " seed=" << seed << " kept=" << rr.G.edge_count()
            << " open_final=" << rr.trajectories.back().open_count
            << " triangles=" << triangles << "\n";

  if (!out_dir.empty()) {
    fs::path dir(out_dir);
    write_edge_list(dir / "G.edges", rr.G);
    atomic_write(dir / "trajectory.csv", trajectory_csv(rr.trajectories));
    atomic_write(dir / "schedule.json", schedule_json_text(sched));
    if (retain_samples)
      atomic_write(dir / "trace.jsonl", step_trace_jsonl(rr.samples, rr.trajectories));
  }

  int code = 0;
  if (audit) {
    AuditOptions aopt;
    aopt.budget = audit_budget;
    aopt.seed = rng::derive_seed(seed, 9001);
    aopt.threads = threads;
    AuditReport rep = audit_events(rr.states, rr.samples, sched, aopt);
    if (!out_dir.empty()) {
      atomic_write(fs::path(out_dir) / "audit.json", audit_json_text(rep));
      atomic_write(fs::path(out_dir) / "audit.txt", audit_summary_text(rep));
    }
    std::cout << audit_summary_text(rep);
    if (!rep.hard_pass()) code = 1;
  }
  if (triangles != 0 || !subgraph) {
    std::cerr << "hard check failed: produced graph is "
              << (triangles ? "not triangle-free" : "not a host subgraph") << "\n";
    code = 1;
  }
  return code;
}

int run_pack(const std::string& host_spec, uint32_t n, double eps, double xi,
             double C0, uint64_t seed, const ScheduleOverrides& ov,
             const std::string& out_dir, int threads) {
  EdgeSet host = load_host(host_spec, n, seed);
  PackOptions popt;
  popt.threads = threads;
  PackingResult pr = pack(host, eps, xi, C0, seed, ov, popt);

  std::cout << "pack: n=" << pr.schedule.n << " seed=" << seed << " rounds="
            << pr.per_round.size() << "/" << pr.rounds_planned
            << " covered=" << pr.covered_edges << "/" << pr.host_edges
            << " coverage=" << format_double(pr.coverage) << "\n";
  for (const std::string& w : pr.warnings) std::cout << "warning: " << w << "\n";

  if (!out_dir.empty()) write_packing_dir(out_dir, pr, host_spec, seed);

  std::string why;
  if (!check_packing(pr, host, why)) {
    std::cerr << "hard check failed: " << why << "\n";
    return 1;
  }
  return 0;
}

int run_srk3(uint32_t r, double A, uint64_t seed, const ScheduleOverrides& ov,
             const std::string& out_dir, int threads) {
  PackOptions popt;
  popt.threads = threads;
  Srk3Report rep = srk3_demo(r, A, seed, ov, popt);

  std::cout << "srk3: r=" << r << " vertices=" << rep.vertices
            << " target=" << rep.target << " seed=" << seed
            << " coverage=" << format_double(rep.packing.coverage) << "\n";
  for (const WitnessEntry& w : rep.witnesses) {
    std::cout << "  G_" << w.graph_index << ": ";
    if (w.exact)
      std::cout << "alpha=" << w.alpha;
    else
      std::cout << "witness_rate=" << format_double(w.witness_rate) << " (se "
                << format_double(w.standard_error) << ")";
    std::cout << " target=" << w.target
              << (w.below_target ? " below" : " not-below") << "\n";
  }

  if (!out_dir.empty()) {
    write_packing_dir(out_dir, rep.packing, "complete", seed);
    atomic_write(fs::path(out_dir) / "srk3.json", srk3_json_text(rep, seed));
  }

  EdgeSet host = complete_graph(rep.vertices);
  std::string why;
  if (!check_packing(rep.packing, host, why)) {
    std::cerr << "hard check failed: " << why << "\n";
    return 1;
  }
  return 0;
}

int run_verify(const std::string& in_dir) {
  fs::path dir(in_dir);
  nlohmann::json meta = nlohmann::json::parse(slurp(dir / "packing.json"));
  std::string host_spec = meta.at("host").get<std::string>();
  uint64_t seed = meta.at("seed").get<uint64_t>();
  uint32_t n = meta.at("n").get<uint32_t>();

  std::vector<EdgeSet> graphs;
  for (const auto& name : meta.at("graph_files"))
    graphs.push_back(read_edge_list(dir / name.get<std::string>()));
  EdgeSet leftover = read_edge_list(dir / "leftover.edges");

  AuditReport rep;
  rep.seed = seed;
  for (size_t i = 0; i < graphs.size(); ++i) {
    AuditCheck c;
    c.name = "graph-triangle-free";
    c.scope = "G_" + std::to_string(i);
    c.bound_desc = "triangle count is zero";
    c.relation = "<=";
    c.bound = 0.0;
    c.observed = static_cast<double>(triangle_count(graphs[i]));
    c.within = c.observed == 0.0;
    c.verdict = c.within ? "pass" : "fail";
    rep.checks.push_back(std::move(c));
  }
  {
    AuditCheck c;
    c.name = "pairwise-disjoint";
    c.scope = "all graphs";
    c.bound_desc = "no edge appears in two graphs or in a graph and the leftover";
    c.relation = "<=";
    c.bound = 0.0;
    size_t overlaps = 0;
    EdgeSet acc(n);
    for (size_t i = 0; i < graphs.size(); ++i) {
      if (acc.intersects(graphs[i])) {
        ++overlaps;
        c.witnesses.push_back("graph " + std::to_string(i) +
                              " overlaps an earlier graph");
      }
      acc.insert_all(graphs[i]);
    }
    if (acc.intersects(leftover)) {
      ++overlaps;
      c.witnesses.push_back("leftover overlaps a graph");
    }
    c.observed = static_cast<double>(overlaps);
    c.within = overlaps == 0;
    c.verdict = c.within ? "pass" : "fail";
    rep.checks.push_back(std::move(c));
  }
  {
    AuditCheck c;
    c.name = "edge-accounting";
    c.scope = "packing.json";
    c.bound_desc = "recorded covered/leftover counts match the files";
    c.relation = "<=";
    c.bound = 0.0;
    size_t sum = 0;
    for (const EdgeSet& g : graphs) sum += g.edge_count();
    uint64_t rec_cov = meta.at("covered_edges").get<uint64_t>();
    uint64_t rec_host = meta.at("host_edges").get<uint64_t>();
    uint64_t rec_left = meta.at("leftover_edges").get<uint64_t>();
    size_t mismatches = 0;
    if (sum != rec_cov) {
      ++mismatches;
      c.witnesses.push_back("graph files hold " + std::to_string(sum) +
                            " edges, recorded covered_edges is " +
                            std::to_string(rec_cov));
    }
    if (leftover.edge_count() != rec_left) {
      ++mismatches;
      c.witnesses.push_back("leftover file holds " +
                            std::to_string(leftover.edge_count()) +
                            " edges, recorded " + std::to_string(rec_left));
    }
    if (rec_cov + rec_left != rec_host) {
      ++mismatches;
      c.witnesses.push_back("covered + leftover != host_edges in packing.json");
    }
    c.observed = static_cast<double>(mismatches);
    c.within = mismatches == 0;
    c.verdict = c.within ? "pass" : "fail";
    rep.checks.push_back(std::move(c));
  }
  {
    AuditCheck c;
    c.name = "host-partition";
    c.scope = "all files";
    c.relation = "<=";
    c.bound = 0.0;
    bool have_host = true;
    EdgeSet host;
    try {
      host = load_host(host_spec, n, seed);
    } catch (const std::exception& e) {
      have_host = false;
      c.bound_desc = "host unavailable, partition not checked";
      c.verdict = "report-only";
      c.witnesses.push_back(e.what());
    }
    if (have_host) {
      c.bound_desc = "graphs plus leftover equal the reconstructed host exactly";
      EdgeSet acc(n);
      for (const EdgeSet& g : graphs) acc.insert_all(g);
      acc.insert_all(leftover);
      size_t mismatch = 0;
      if (!(acc == host)) {
        EdgeSet extra = acc;
        extra.erase_all(host);
        EdgeSet missing = host;
        missing.erase_all(acc);
        mismatch = extra.edge_count() + missing.edge_count();
        c.witnesses.push_back(std::to_string(extra.edge_count()) +
                              " edges outside the host, " +
                              std::to_string(missing.edge_count()) +
                              " host edges uncovered");
      }
      c.observed = static_cast<double>(mismatch);
      c.within = mismatch == 0;
      c.verdict = c.within ? "pass" : "fail";
    }
    rep.checks.push_back(std::move(c));
  }

  atomic_write(dir / "audit.json", audit_json_text(rep));
  std::cout << audit_summary_text(rep);
  return rep.hard_pass() ? 0 : 1;
}

int run_handshake(const std::string& host_spec, uint32_t n, uint64_t seed,
                  long long sub_size, long long super_size, uint64_t samples,
                  const std::string& out_dir) {
  EdgeSet host = load_host(host_spec, n, seed);
  uint32_t hn = host.vertex_count();
  if (super_size <= 0) super_size = hn / 2;
  if (sub_size <= 0) sub_size = std::max<long long>(1, super_size / 2);
  HandshakeReport rep = handshake_check(host, static_cast<size_t>(sub_size),
                                        static_cast<size_t>(super_size), samples, seed);
  std::string js = handshake_json_text(rep, seed);
  if (!out_dir.empty()) atomic_write(fs::path(out_dir) / "handshake.json", js);
  std::cout << js;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-random triangle-free nibble: schedules, runs, packings, audits"};
  std::string mode;
  app.add_option("--mode", mode, "params | nibble | pack | srk3 | verify | handshake")
      ->required();
  uint32_t n = 0;
  app.add_option("--n", n, "vertex count for generated hosts");
  double eps = 0.5, xi = 1.0, C0 = 1.0, A = 1.0;
  app.add_option("--eps", eps, "target uncovered fraction (pack)");
  app.add_option("--xi", xi, "host uniformity floor (pack)");
  app.add_option("--C0", C0, "set-size constant");
  app.add_option("--A", A, "srk3 vertex constant, N = floor(A*r^2*log r)");
  uint32_t r = 2;
  app.add_option("--r", r, "srk3 graph count");
  std::optional<uint64_t> seed_opt;
  app.add_option("--seed", seed_opt, "64-bit seed; generated and recorded when omitted");
  std::vector<std::string> override_kvs;
  app.add_option("--override", override_kvs,
                 "schedule override key=value; keys: beta sigma delta gamma C C0 "
                 "eps xi p steps s (repeatable)");
  std::string host_spec = "complete";
  app.add_option("--host", host_spec, "complete | gnp:<p> | file:<path>");
  std::string out_dir;
  app.add_option("--out", out_dir, "output directory");
  std::string in_dir;
  app.add_option("--in", in_dir, "input directory (verify)");
  int audit_budget = 32;
  app.add_option("--audit-budget", audit_budget, "sampled pairs per audited event family");
  bool retain_samples = false;
  app.add_flag("--retain-samples", retain_samples,
               "keep per-step samples and write trace.jsonl");
  bool audit = false;
  app.add_flag("--audit", audit, "retain the state history and audit it (nibble)");
  int threads = threads_from_env();
  app.add_option("--threads", threads, "worker threads (fallback: NIBBLEPACK_THREADS)");
  uint64_t samples = 10000;
  app.add_option("--samples", samples, "sample count (handshake)");
  long long sub_size = 0, super_size = 0;
  app.add_option("--sub-size", sub_size, "t for handshake (default s/2)");
  app.add_option("--super-size", super_size, "s for handshake (default n/2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (threads < 1) threads = 1;
  ScheduleOverrides ov;
  for (const std::string& kv : override_kvs) {
    std::string err;
    if (!apply_override(ov, kv, err)) {
      std::cerr << "error: " << err << "\n";
      return 2;
    }
  }
  uint64_t seed;
  if (seed_opt) {
    seed = *seed_opt;
  } else {
    std::random_device rd;
    seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  }

  try {
    if (mode == "params") return run_params(n, ov, out_dir);
    if (mode == "nibble")
      return run_nibble(host_spec, n, seed, ov, out_dir, threads, retain_samples,
                        audit, audit_budget);
    if (mode == "pack")
      return run_pack(host_spec, n, eps, xi, C0, seed, ov, out_dir, threads);
    if (mode == "srk3") return run_srk3(r, A, seed, ov, out_dir, threads);
    if (mode == "verify") {
      if (in_dir.empty()) {
        std::cerr << "error: verify mode needs --in\n";
        return 2;
      }
      return run_verify(in_dir);
    }
    if (mode == "handshake")
      return run_handshake(host_spec, n, seed, sub_size, super_size, samples, out_dir);
    std::cerr << "error: unknown mode \"" << mode << "\"\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
