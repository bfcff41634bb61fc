#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "nibblepack/io.hpp"
#include "nibblepack/packing.hpp"
#include "nibblepack/verifier.hpp"

using namespace nibblepack;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nibblepack-test-" + std::to_string(std::rand()) +
            std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

size_t line_count(const std::string& text) {
  size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles survive a text round trip at full precision") {
  for (double x : {0.0, 1.0, -1.0, 0.1, 1e-300, 1e300, 3.141592653589793,
                   0.015706863012006359, 1.0 / 3.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("edge lists round trip and canonicalize") {
  EdgeSet g(9);
  g.insert(0, 3);
  g.insert(7, 2);
  g.insert(8, 0);
  std::string text = edge_list_text(g);
  CHECK(text == "9 3\n0 3\n0 8\n2 7\n");
  CHECK(parse_edge_list(text) == g);

  // unordered, duplicated, comment-laden input normalizes to the same set
  std::string messy =
      "# host graph\n"
      "9 4\n"
      "3 0\n"
      "\n"
      "7 2\n"
      "0 8\n"
      "8 0\n";
  CHECK(parse_edge_list(messy) == g);

  EdgeSet empty(4);
  CHECK(parse_edge_list(edge_list_text(empty)) == empty);
}

TEST_CASE("malformed edge lists are rejected with the offending line") {
  auto line_of = [](const std::string& text) -> size_t {
    try {
      parse_edge_list(text);
    } catch (const ParseError& e) {
      return e.line;
    }
    return 0;
  };
  CHECK(line_of("") == 1);                       // missing header
  CHECK(line_of("x 2\n0 1\n") == 1);             // junk header
  CHECK(line_of("4\n") == 1);                    // header too short
  CHECK(line_of("4 1 9\n") == 1);                // header too long
  CHECK(line_of("0 0\n") == 1);                  // n out of range
  CHECK(line_of("4 2\n0 1\n2 2\n") == 3);        // loop
  CHECK(line_of("4 2\n0 1\n1 9\n") == 3);        // vertex out of range
  CHECK(line_of("4 1\n0 1 5\n") == 2);           // trailing token
  CHECK(line_of("4 1\n0 -1\n") == 2);            // negative vertex
  CHECK(line_of("4 3\n0 1\n1 2\n") == 4);        // fewer edges than declared, flagged at EOF
  CHECK(line_of("4 1\n0 1\n1 2\n") == 3);        // more edges than declared
  CHECK_THROWS_AS(parse_edge_list("4 1\n0 1\n1 2\n"), ParseError);
}

TEST_CASE("atomic writes land complete and leave no droppings") {
  TempDir td;
  fs::path target = td.path / "deep" / "nested" / "out.txt";
  atomic_write(target, "payload\n");
  std::ifstream in(target);
  std::string got((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  CHECK(got == "payload\n");
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));

  atomic_write(target, "replaced\n");
  std::ifstream in2(target);
  std::string got2((std::istreambuf_iterator<char>(in2)),
                   std::istreambuf_iterator<char>());
  CHECK(got2 == "replaced\n");

  TempDir td2;
  fs::path file_target = td2.path / "file.edges";
  EdgeSet g(5);
  g.insert(1, 4);
  write_edge_list(file_target, g);
  CHECK(read_edge_list(file_target) == g);
  CHECK_THROWS(read_edge_list(td2.path / "missing.edges"));
}

TEST_CASE("host loading: complete, seeded random, file, and junk") {
  CHECK(load_host("complete", 7, 1) == complete_graph(7));

  EdgeSet full = load_host("gnp:1.0", 40, 5);
  CHECK(full == complete_graph(40));
  CHECK(load_host("gnp:0", 40, 5).empty());
  CHECK(load_host("gnp:0.0", 40, 5).empty());

  // seeded and reproducible, with binomial edge count
  EdgeSet a = load_host("gnp:0.3", 80, 9);
  EdgeSet b = load_host("gnp:0.3", 80, 9);
  CHECK(a == b);
  EdgeSet c = load_host("gnp:0.3", 80, 10);
  CHECK_FALSE(a == c);
  double total = 80.0 * 79.0 / 2.0;
  double se = std::sqrt(0.3 * 0.7 * total);
  CHECK(std::abs(double(a.edge_count()) - 0.3 * total) <= 4 * se);

  TempDir td;
  EdgeSet g(6);
  g.insert(2, 5);
  write_edge_list(td.path / "h.edges", g);
  // n in the spec is ignored for file hosts
  CHECK(load_host("file:" + (td.path / "h.edges").string(), 99, 1) == g);

  CHECK_THROWS_AS(load_host("gnp:1.5", 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(load_host("gnp:nope", 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(load_host("gnp:0.5x", 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(load_host("lattice", 10, 1), std::invalid_argument);
}

TEST_CASE("trajectory and schedule tables have the promised shape") {
  Schedule s = build_schedule(100);
  ScheduleOverrides ov;
  ov.p = 0.05;
  ov.steps = 2;
  Schedule quick = build_schedule(64, ov);
  RunOptions opts;
  opts.retain_samples = true;
  RunResult r = run(complete_graph(64), quick, 3, opts);

  std::string csv = trajectory_csv(r.trajectories);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "step,open,kept,taken,q_pred,pi_pred,max_deg_open,max_Y,max_Z");
  CHECK(line_count(csv) == r.trajectories.size() + 1);
  std::string row0;
  std::getline(lines, row0);
  CHECK(row0.rfind("0," + std::to_string(64 * 63 / 2) + ",0,0,1,", 0) == 0);

  std::string sched_csv = schedule_csv(s);
  std::istringstream sl(sched_csv);
  std::string sh;
  std::getline(sl, sh);
  CHECK(sh == "i,q_i,pi_i,tau_i");
  CHECK(line_count(sched_csv) == static_cast<size_t>(s.steps) + 2);

  // every line of the trace is a JSON object with the step's counts
  std::string trace = step_trace_jsonl(r.samples, r.trajectories);
  CHECK(line_count(trace) == r.samples.size());
  std::istringstream tl(trace);
  std::string ln;
  int step = 1;
  while (std::getline(tl, ln)) {
    auto j = nlohmann::json::parse(ln);
    CHECK(j["step"] == step);
    CHECK(j["gamma"] == r.samples[step - 1].gamma.edge_count());
    CHECK(j["open_after"] == r.trajectories[step].open_count);
    CHECK(j["rng_draws"] == r.samples[step - 1].rng_draws);
    ++step;
  }
}

TEST_CASE("schedule JSON records values and their provenance") {
  ScheduleOverrides ov;
  ov.sigma = 0.04;
  Schedule s = build_schedule(500, ov);
  auto j = nlohmann::json::parse(schedule_json_text(s));
  CHECK(j["n"] == 500);
  CHECK(j["sigma"] == 0.04);
  CHECK(j["steps"] == s.steps);
  CHECK(j["provenance"]["sigma"] == "override");
  CHECK(j["provenance"]["beta"] == "default");
  CHECK(j["constants"]["delta"] == s.delta);
  CHECK(j.contains("rho"));
  CHECK(j.contains("s0_feasible"));

  // serialization is deterministic
  CHECK(schedule_json_text(s) == schedule_json_text(build_schedule(500, ov)));
}

TEST_CASE("audit serializations carry every check and a faithful summary") {
  AuditReport rep;
  rep.seed = 12;
  rep.budget = 4;
  rep.checks.push_back({"state-soundness", "step 0", "no violations", "<=", 0.0,
                        0.0, "pass", true, {}});
  rep.checks.push_back({"open-degree", "step 1", "q_i n", "<=", 50.0, 61.0,
                        "report-only", false, {}});
  rep.checks.push_back({"state-soundness", "step 2", "no violations", "<=", 0.0,
                        3.0, "fail", false, {"kept-triangle (0,1,2)"}});

  auto j = nlohmann::json::parse(audit_json_text(rep));
  CHECK(j["seed"] == 12);
  CHECK(j["hard_pass"] == false);
  CHECK(j["exceeded"] == 2);
  REQUIRE(j["checks"].size() == 3);
  CHECK(j["checks"][1]["name"] == "open-degree");
  CHECK(j["checks"][1]["within"] == false);
  CHECK(j["checks"][2]["witnesses"][0] == "kept-triangle (0,1,2)");

  std::string summary = audit_summary_text(rep);
  CHECK(summary.find("FAIL") != std::string::npos);
  CHECK(summary.find("kept-triangle") != std::string::npos);
  CHECK(summary.find("open-degree") != std::string::npos);

  AuditReport clean;
  clean.checks.push_back({"state-soundness", "step 0", "no violations", "<=",
                          0.0, 0.0, "pass", true, {}});
  CHECK(audit_summary_text(clean).find("PASS") != std::string::npos);
}

TEST_CASE("packing artifacts serialize with stable names and shapes") {
  CHECK(graph_file_name(0) == "G_0000.edges");
  CHECK(graph_file_name(31) == "G_0031.edges");

  ScheduleOverrides ov;
  ov.p = 0.05;
  ov.steps = 3;
  PackingResult pr = pack(complete_graph(30), 0.5, 1.0, 1.0, 77, ov);
  auto j = nlohmann::json::parse(packing_json_text(pr, "complete", 77));
  CHECK(j["host"] == "complete");
  CHECK(j["seed"] == 77);
  CHECK(j["n"] == 30);
  CHECK(j["host_edges"] == 435);
  CHECK(j["covered_edges"] == pr.covered_edges);
  CHECK(j["leftover_edges"] == pr.leftover.edge_count());
  CHECK(j["graph_files"].size() == pr.graphs.size());
  CHECK(j["constants"]["rounds"] == pr.rounds_planned);
  CHECK(j["per_round"].size() == pr.per_round.size());
  CHECK(packing_json_text(pr, "complete", 77) == packing_json_text(pr, "complete", 77));

  Srk3Report sr = srk3_demo(2, 6.0, 5, ov);
  auto sj = nlohmann::json::parse(srk3_json_text(sr, 5));
  CHECK(sj["vertices"] == sr.vertices);
  CHECK(sj["target"] == sr.target);
  REQUIRE(sj["witnesses"].size() == sr.witnesses.size());
  for (size_t i = 0; i < sr.witnesses.size(); ++i) {
    if (sr.witnesses[i].exact)
      CHECK(sj["witnesses"][i]["alpha"] == sr.witnesses[i].alpha);
    else
      CHECK(sj["witnesses"][i].contains("witness_rate"));
  }

  HandshakeReport hr = handshake_check(complete_graph(20), 3, 8, 50, 2);
  auto hj = nlohmann::json::parse(handshake_json_text(hr, 2));
  CHECK(hj["expected"] == hr.expected);
  CHECK(hj["pass"] == hr.pass);
  CHECK(hj["samples"] == 50);
}

}  // TEST_SUITE
