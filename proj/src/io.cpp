#include "nibblepack/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nibblepack/rng.hpp"

namespace nibblepack {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string edge_list_text(const EdgeSet& g) {
  std::string out = std::to_string(g.vertex_count()) + " " +
                    std::to_string(g.edge_count()) + "\n";
  g.for_each_edge([&](Edge e) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += '\n';
  });
  return out;
}

EdgeSet parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, extra;
  size_t line_no = 0;
  bool have_header = false;
  uint64_t n = 0, declared = 0, seen = 0;
  EdgeSet g;
  while (std::getline(in, line)) {
    ++line_no;
    size_t at = line.find_first_not_of(" \t\r");
    if (at == std::string::npos || line[at] == '#') continue;
    if (line.find('-') != std::string::npos)
      throw ParseError("negative values are not allowed", line_no);
    std::istringstream ls(line);
    if (!have_header) {
      if (!(ls >> n >> declared))
        throw ParseError("malformed header, expected \"n edge-count\"", line_no);
      if (ls >> extra) throw ParseError("trailing tokens after header", line_no);
      if (n == 0 || n > 50'000'000)
        throw ParseError("vertex count out of range", line_no);
      g = EdgeSet(static_cast<uint32_t>(n));
      have_header = true;
      continue;
    }
    uint64_t u = 0, v = 0;
    if (!(ls >> u >> v))
      throw ParseError("malformed edge line, expected \"u v\"", line_no);
    if (ls >> extra) throw ParseError("trailing tokens after edge", line_no);
    if (u >= n || v >= n) throw ParseError("vertex out of range", line_no);
    if (u == v) throw ParseError("loop edge", line_no);
    if (++seen > declared)
      throw ParseError("more edges than the header declares", line_no);
    g.insert(make_edge(static_cast<uint32_t>(u), static_cast<uint32_t>(v)));
  }
  if (!have_header) throw ParseError("missing header", 1);
  if (seen < declared)
    throw ParseError("fewer edges than the header declares", line_no + 1);
  return g;
}

void write_edge_list(const std::filesystem::path& path, const EdgeSet& g) {
  atomic_write(path, edge_list_text(g));
}

EdgeSet read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_edge_list(ss.str());
}

EdgeSet load_host(const std::string& spec, uint32_t n, uint64_t seed) {
  if (spec == "complete") return complete_graph(n);
  if (spec.rfind("gnp:", 0) == 0) {
    std::string tail = spec.substr(4);
    double prob = 0.0;
    try {
      size_t pos = 0;
      prob = std::stod(tail, &pos);
      if (pos != tail.size()) throw std::invalid_argument("trailing");
    } catch (...) {
      throw std::invalid_argument("load_host: bad gnp probability \"" + tail + "\"");
    }
    if (!(prob >= 0.0 && prob <= 1.0))
      throw std::invalid_argument("load_host: gnp probability must be in [0,1]");
    EdgeSet g(n);
    for (uint32_t u = 0; u < n; ++u)
      for (uint32_t v = u + 1; v < n; ++v)
        if (rng::draw(seed, 0, Stream::Host, edge_index({u, v}, n)) < prob)
          g.insert(u, v);
    return g;
  }
  if (spec.rfind("file:", 0) == 0) return read_edge_list(spec.substr(5));
  throw std::invalid_argument("load_host: unknown host spec \"" + spec + "\"");
}

std::string trajectory_csv(const std::vector<TrajectoryRecord>& records) {
  std::string out = "step,open,kept,taken,q_pred,pi_pred,max_deg_open,max_Y,max_Z\n";
  for (const TrajectoryRecord& r : records) {
    out += std::to_string(r.step) + "," + std::to_string(r.open_count) + "," +
           std::to_string(r.kept_count) + "," + std::to_string(r.taken_count) + "," +
           format_double(r.predicted_open_fraction) + "," +
           format_double(r.predicted_density) + "," +
           std::to_string(r.max_open_degree) + "," +
           std::to_string(r.max_mixed_codegree) + "," +
           std::to_string(r.max_codegree) + "\n";
  }
  return out;
}

std::string schedule_csv(const Schedule& sched) {
  std::string out = "i,q_i,pi_i,tau_i\n";
  for (int i = 0; i <= sched.steps; ++i)
    out += std::to_string(i) + "," + format_double(sched.q[i]) + "," +
           format_double(sched.pi[i]) + "," + format_double(sched.tau[i]) + "\n";
  return out;
}

namespace {

json schedule_json(const Schedule& s) {
  json j;
  j["n"] = s.n;
  j["sigma"] = s.sigma;
  j["p"] = s.p;
  j["steps"] = s.steps;
  j["rho"] = s.rho;
  j["s"] = s.s;
  j["s0"] = s.s0;
  j["s0_feasible"] = s.s0_feasible;
  j["s_capped"] = s.s_capped;
  j["constants"] = {{"beta", s.beta}, {"delta", s.delta}, {"gamma", s.gamma},
                    {"C", s.C},       {"C0", s.C0},       {"C1", s.C1},
                    {"eps", s.eps},   {"xi", s.xi}};
  const ScheduleOverrides& o = s.overrides;
  json prov;
  prov["beta"] = o.beta ? "override" : "default";
  prov["sigma"] = o.sigma ? "override" : "default";
  prov["delta"] = o.delta ? "override" : "default";
  prov["gamma"] = o.gamma ? "override" : "default";
  prov["C"] = o.C ? "override" : "default";
  prov["C0"] = o.C0 ? "override" : "default";
  prov["eps"] = o.eps ? "override" : "default";
  prov["xi"] = o.xi ? "override" : "default";
  prov["p"] = o.p ? "override" : "default";
  prov["steps"] = o.steps ? "override" : "default";
  prov["s"] = o.s ? "override" : "default";
  j["provenance"] = prov;
  return j;
}

json check_json(const AuditCheck& c) {
  json j;
  j["name"] = c.name;
  j["scope"] = c.scope;
  j["bound"] = c.bound;
  j["bound_desc"] = c.bound_desc;
  j["relation"] = c.relation;
  j["observed"] = c.observed;
  j["verdict"] = c.verdict;
  j["within"] = c.within;
  if (!c.witnesses.empty()) j["witnesses"] = c.witnesses;
  return j;
}

json constants_json(const Constants& c) {
  return {{"delta", c.delta}, {"gamma", c.gamma},   {"beta", c.beta},
          {"C", c.C},         {"C1", c.C1},         {"s", c.s},
          {"s_capped", c.s_capped}, {"rounds", c.I_outer}};
}

}  // namespace

std::string schedule_json_text(const Schedule& sched) {
  return schedule_json(sched).dump(2) + "\n";
}

std::string step_trace_jsonl(const std::vector<StepSample>& samples,
                             const std::vector<TrajectoryRecord>& records) {
  std::string out;
  for (const StepSample& s : samples) {
    size_t pairs = 0, triples = 0, repaired_edges = 0;
    for (const BadElement& b : s.bad) (b.size == 2 ? pairs : triples) += 1;
    for (const BadElement& b : s.repaired) repaired_edges += b.size;
    json j;
    j["step"] = s.step;
    j["gamma"] = s.gamma.edge_count();
    j["bad_pairs"] = pairs;
    j["bad_triples"] = triples;
    j["repaired"] = s.repaired.size();
    j["repaired_edges"] = repaired_edges;
    j["closed_neighbor"] = s.closed1.edge_count();
    j["closed_pair"] = s.closed2.edge_count();
    j["stabilized"] = s.stabilized.edge_count();
    j["rng_draws"] = s.rng_draws;
    if (s.step < records.size()) {
      j["open_after"] = records[s.step].open_count;
      j["kept_after"] = records[s.step].kept_count;
    }
    out += j.dump() + "\n";
  }
  return out;
}

std::string audit_json_text(const AuditReport& report) {
  json j;
  j["seed"] = report.seed;
  j["budget"] = report.budget;
  j["hard_pass"] = report.hard_pass();
  j["exceeded"] = report.exceed_count();
  json arr = json::array();
  for (const AuditCheck& c : report.checks) arr.push_back(check_json(c));
  j["checks"] = arr;
  return j.dump(2) + "\n";
}

std::string audit_summary_text(const AuditReport& report) {
  std::ostringstream os;
  size_t pass = 0, fail = 0, rep = 0;
  for (const AuditCheck& c : report.checks) {
    if (c.verdict == "pass")
      ++pass;
    else if (c.verdict == "fail")
      ++fail;
    else
      ++rep;
  }
  os << "audit: " << report.checks.size() << " checks, " << pass << " pass, "
     << fail << " fail, " << rep << " report-only (" << report.exceed_count()
     << " outside their bound)\n";
  os << "hard checks: " << (report.hard_pass() ? "PASS" : "FAIL") << "\n";
  for (const AuditCheck& c : report.checks) {
    if (c.verdict != "fail") continue;
    os << "  FAIL " << c.name << " [" << c.scope << "]: observed "
       << format_double(c.observed) << ", wanted " << c.relation << " "
       << c.bound_desc << "\n";
    for (const std::string& w : c.witnesses) os << "    witness: " << w << "\n";
  }
  int listed = 0;
  for (const AuditCheck& c : report.checks) {
    if (c.verdict != "report-only" || c.within) continue;
    if (listed == 10) {
      os << "  ... more report-only exceedances omitted\n";
      break;
    }
    os << "  over " << c.name << " [" << c.scope << "]: observed "
       << format_double(c.observed) << " vs " << c.bound_desc << "\n";
    ++listed;
  }
  return os.str();
}

std::string graph_file_name(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "G_%04zu.edges", index);
  return buf;
}

std::string packing_json_text(const PackingResult& result, const std::string& host_spec,
                              uint64_t seed) {
  json j;
  j["host"] = host_spec;
  j["seed"] = seed;
  j["n"] = result.schedule.n;
  j["host_edges"] = result.host_edges;
  j["covered_edges"] = result.covered_edges;
  j["leftover_edges"] = result.leftover.edge_count();
  j["coverage"] = result.coverage;
  j["rounds_planned"] = result.rounds_planned;
  j["rounds_run"] = result.per_round.size();
  j["stopped_early"] = result.stopped_early;
  json files = json::array();
  for (size_t i = 0; i < result.graphs.size(); ++i) files.push_back(graph_file_name(i));
  j["graph_files"] = files;
  j["constants"] = constants_json(result.constants);
  j["schedule"] = schedule_json(result.schedule);
  json rounds = json::array();
  for (const RoundStat& r : result.per_round)
    rounds.push_back({{"round", r.round},
                      {"produced_edges", r.produced_edges},
                      {"host_edges_before", r.host_edges_before}});
  j["per_round"] = rounds;
  j["uniformity"] = {{"sampled_min", result.sampled_min_uniformity},
                     {"xi", result.schedule.xi}};
  json diags = json::array();
  for (const InvariantDiagnostic& d : result.invariant_diagnostics)
    diags.push_back({{"round", d.round},
                     {"pair", d.pair},
                     {"ratio", d.ratio},
                     {"lower", d.lower},
                     {"upper", d.upper},
                     {"within", d.within}});
  j["leftover_decay"] = diags;
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

std::string srk3_json_text(const Srk3Report& report, uint64_t seed) {
  json j;
  j["seed"] = seed;
  j["vertices"] = report.vertices;
  j["target"] = report.target;
  j["graphs"] = report.packing.graphs.size();
  j["host_edges"] = report.packing.host_edges;
  j["covered_edges"] = report.packing.covered_edges;
  j["coverage"] = report.packing.coverage;
  j["warnings"] = report.packing.warnings;
  json ws = json::array();
  for (const WitnessEntry& w : report.witnesses) {
    json e;
    e["graph"] = w.graph_index;
    e["exact"] = w.exact;
    e["target"] = w.target;
    e["below_target"] = w.below_target;
    if (w.exact) {
      e["alpha"] = w.alpha;
    } else {
      e["witness_rate"] = w.witness_rate;
      e["standard_error"] = w.standard_error;
    }
    ws.push_back(e);
  }
  j["witnesses"] = ws;
  return j.dump(2) + "\n";
}

std::string handshake_json_text(const HandshakeReport& report, uint64_t seed) {
  json j;
  j["seed"] = seed;
  j["samples"] = report.samples;
  j["super_size"] = report.super_size;
  j["sub_size"] = report.sub_size;
  j["edges_super"] = report.edges_super;
  j["expected"] = report.expected;
  j["mean"] = report.mean;
  j["sd"] = report.sd;
  j["standard_error"] = report.standard_error;
  j["pass"] = report.pass;
  return j.dump(2) + "\n";
}

}  // namespace nibblepack
