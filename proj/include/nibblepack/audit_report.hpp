#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nibblepack {

// One audited quantity: a bound, the observed extreme, and a verdict.
// Hard invariants carry pass/fail; bounds of asymptotic origin carry
// report-only with `within` recording whether the bound held anyway.
struct AuditCheck {
  std::string name;
  std::string scope;       // "step 7", "final", "all steps"
  std::string bound_desc;  // human-readable bound
  std::string relation;    // "<=" or ">=" (observed vs bound)
  double bound = 0.0;
  double observed = 0.0;
  std::string verdict;  // "pass" | "fail" | "report-only"
  bool within = true;
  std::vector<std::string> witnesses;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  uint64_t seed = 0;
  int budget = 0;

  bool hard_pass() const {
    for (const auto& c : checks)
      if (c.verdict == "fail") return false;
    return true;
  }
  size_t exceed_count() const {
    size_t k = 0;
    for (const auto& c : checks)
      if (!c.within) ++k;
    return k;
  }
};

}  // namespace nibblepack
