#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nibblepack/audit_report.hpp"
#include "nibblepack/packing.hpp"
#include "nibblepack/run.hpp"

namespace nibblepack {

// Shortest round-trip decimal form; deterministic across runs.
std::string format_double(double x);

// Writes to <path>.tmp in the same directory, then renames over path.
void atomic_write(const std::filesystem::path& path, std::string_view content);

// Edge-list text format: header "n <count>", then one "u v" per line,
// 0-based, u < v. Ingest accepts unordered pairs, re-canonicalizes and
// deduplicates; loops, out-of-range vertices and malformed lines raise
// ParseError with the offending line number.
struct ParseError : std::runtime_error {
  size_t line;
  ParseError(const std::string& msg, size_t line_no)
      : std::runtime_error(msg), line(line_no) {}
};

std::string edge_list_text(const EdgeSet& g);
EdgeSet parse_edge_list(std::string_view text);
void write_edge_list(const std::filesystem::path& path, const EdgeSet& g);
EdgeSet read_edge_list(const std::filesystem::path& path);

// "complete", "gnp:<p>" (seeded, host stream), or "file:<path>".
// n is ignored for file hosts (the header fixes it).
EdgeSet load_host(const std::string& spec, uint32_t n, uint64_t seed);

std::string trajectory_csv(const std::vector<TrajectoryRecord>& records);
std::string schedule_csv(const Schedule& sched);
std::string schedule_json_text(const Schedule& sched);

// One JSON object per line with the per-step counts.
std::string step_trace_jsonl(const std::vector<StepSample>& samples,
                             const std::vector<TrajectoryRecord>& records);

std::string audit_json_text(const AuditReport& report);
std::string audit_summary_text(const AuditReport& report);

// "G_0000.edges" style name for the k-th packed graph.
std::string graph_file_name(size_t index);

std::string packing_json_text(const PackingResult& result, const std::string& host_spec,
                              uint64_t seed);
std::string srk3_json_text(const Srk3Report& report, uint64_t seed);
std::string handshake_json_text(const HandshakeReport& report, uint64_t seed);

}  // namespace nibblepack
