#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace nibblepack {

inline constexpr double kD0 = 108.0;
inline constexpr double kBeta0 = 1.0 / 14.0;

// Inverse of F(y) = ∫_0^y e^{t²} dt: returns y >= 0 with F(y) = x.
// Bracketing plus safeguarded Newton over adaptive Simpson quadrature.
// Throws std::domain_error for x < 0 or non-finite x, std::range_error
// when x is large enough that e^{y²} would overflow.
double psi(double x);

// ∫_a^b e^{t²} dt to absolute tolerance tol (a <= b).
double growth_integral(double a, double b, double tol);

struct Constants {
  double delta = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double C = 0.0;
  double C1 = 0.0;
  long long s = 0;
  bool s_capped = false;
  int I_outer = 0;
};

// delta = 1/4, gamma = eps²·xi, beta = beta0/2,
// C = max{C0, D0/(delta²·sqrt(beta)·gamma)}, C1 = 3C,
// s = ceil(C·sqrt(n log n)) capped at n/2,
// I_outer = ceil(log(1/eps) / (rho·(1 - delta))) with rho = sqrt(beta·log(n)/n).
Constants choose_constants(double eps, double xi, double C0, uint32_t n);

// Any field left unset takes its derived default. Values are range-checked
// by build_schedule; which fields were overridden is retained for
// provenance reporting.
struct ScheduleOverrides {
  std::optional<double> beta, sigma, delta, gamma, C, C0, eps, xi, p;
  std::optional<int> steps;
  std::optional<long long> s;
};

// Immutable per-run parameter table. Defaults: sigma = (log n)^-2,
// p = sigma/sqrt(n), steps = ceil(n^beta), q_i = e^{-psi(i·sigma)²},
// pi_0 = sigma with pi_{i+1} = pi_i + sigma·q_i (exact running sum),
// tau_i = 1 - delta·pi_i/(2·pi_I), rho = sqrt(beta·log(n)/n),
// s0 = floor(sigma⁴·q_I²·s) floored at 1.
struct Schedule {
  uint32_t n = 0;
  double beta = 0.0, sigma = 0.0, p = 0.0, rho = 0.0;
  int steps = 0;
  double delta = 0.0, gamma = 0.0, C = 0.0, C0 = 0.0, C1 = 0.0, xi = 0.0, eps = 0.0;
  long long s = 0, s0 = 0;
  bool s_capped = false;
  bool s0_feasible = true;  // false when floor(sigma⁴·q_I²·s) < 1
  std::vector<double> q;
  std::vector<double> pi;
  std::vector<double> tau;
  ScheduleOverrides overrides;

  // 2·q_i·(pi_i + sqrt(sigma))·sqrt(n): the mixed-codegree level every
  // open edge is topped up to by stabilization.
  double closure_threshold(int i) const;
};

Schedule build_schedule(uint32_t n, const ScheduleOverrides& ov = {});

// 1 - (1-p)^{max{closure_threshold(i) - y_e, 0}} for 0 <= i < steps.
double stabilization_prob(const Schedule& sched, int i, double y_e);

}  // namespace nibblepack
