#include "nibblepack/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nibblepack {

namespace {

double growth(double t) { return std::exp(t * t); }

double simpson_rec(double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = growth(lm), frm = growth(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
    return left + right + diff / 15.0;
  return simpson_rec(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// x beyond this would push intermediate e^{y²} evaluations out of double
// range (y ≈ 26.4); schedules only ever need x = I·sigma.
constexpr double kPsiMaxX = 1e300;

// Solve F(y) = x for x > 0 with Newton safeguarded by a bracket.
double invert_growth_integral(double x, double y0) {
  double hi = x < 1.0 ? x : 1.0 + std::sqrt(std::log(x));
  double lo = 0.0;
  double tol = 1e-13 * std::max(1.0, x);
  double y = std::clamp(y0, lo, hi);
  if (y == 0.0) y = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    double f = growth_integral(0.0, y, 0.25 * tol) - x;
    if (std::abs(f) <= tol) return y;
    if (f > 0.0)
      hi = y;
    else
      lo = y;
    double next = y - f * std::exp(-y * y);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    y = next;
  }
  return y;
}

}  // namespace

double growth_integral(double a, double b, double tol) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = growth(a), fm = growth(m), fb = growth(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(a, m, b, fa, fm, fb, whole, tol, 48);
}

double psi(double x) {
  if (std::isnan(x) || x < 0.0) throw std::domain_error("psi: x must be >= 0");
  if (!std::isfinite(x) || x > kPsiMaxX)
    throw std::range_error("psi: argument too large for double-range e^{y^2}");
  if (x == 0.0) return 0.0;
  double guess = x < 1.0 ? x : std::sqrt(std::log(x) + 1.0);
  return invert_growth_integral(x, guess);
}

Constants choose_constants(double eps, double xi, double C0, uint32_t n) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("choose_constants: eps must lie in (0,1)");
  if (!(xi > 0.0 && xi <= 1.0))
    throw std::invalid_argument("choose_constants: xi must lie in (0,1]");
  if (!(C0 > 0.0)) throw std::invalid_argument("choose_constants: C0 must be positive");
  if (n < 3) throw std::invalid_argument("choose_constants: n must be >= 3");

  Constants k;
  k.delta = 0.25;
  k.gamma = eps * eps * xi;
  k.beta = kBeta0 / 2.0;
  k.C = std::max(C0, kD0 / (k.delta * k.delta * std::sqrt(k.beta) * k.gamma));
  k.C1 = 3.0 * k.C;

  double logn = std::log(static_cast<double>(n));
  double s_formula = std::ceil(k.C * std::sqrt(n * logn));
  long long cap = n / 2;
  k.s_capped = s_formula > static_cast<double>(cap);
  k.s = k.s_capped ? cap : static_cast<long long>(s_formula);

  double rho = std::sqrt(k.beta * logn / n);
  k.I_outer = static_cast<int>(std::ceil(std::log(1.0 / eps) / (rho * (1.0 - k.delta))));
  return k;
}

double Schedule::closure_threshold(int i) const {
  return 2.0 * q[i] * (pi[i] + std::sqrt(sigma)) * std::sqrt(static_cast<double>(n));
}

Schedule build_schedule(uint32_t n, const ScheduleOverrides& ov) {
  if (n < 3) throw std::invalid_argument("build_schedule: n must be >= 3");

  double eps = ov.eps.value_or(0.5);
  double xi = ov.xi.value_or(1.0);
  double C0 = ov.C0.value_or(1.0);
  Constants base = choose_constants(eps, xi, C0, n);

  Schedule s;
  s.n = n;
  s.eps = eps;
  s.xi = xi;
  s.C0 = C0;
  s.delta = ov.delta.value_or(base.delta);
  s.gamma = ov.gamma.value_or(base.gamma);
  s.beta = ov.beta.value_or(base.beta);
  if (!(s.delta > 0.0 && s.delta < 1.0))
    throw std::invalid_argument("build_schedule: delta must lie in (0,1)");
  if (!(s.gamma > 0.0 && s.gamma <= 1.0))
    throw std::invalid_argument("build_schedule: gamma must lie in (0,1]");
  if (!(s.beta > 0.0 && s.beta < 1.0))
    throw std::invalid_argument("build_schedule: beta must lie in (0,1)");

  double logn = std::log(static_cast<double>(n));
  s.C = ov.C ? *ov.C
             : std::max(C0, kD0 / (s.delta * s.delta * std::sqrt(s.beta) * s.gamma));
  if (!(s.C > 0.0)) throw std::invalid_argument("build_schedule: C must be positive");
  s.C1 = 3.0 * s.C;

  s.sigma = ov.sigma.value_or(1.0 / (logn * logn));
  if (!(s.sigma > 0.0 && s.sigma < 1.0))
    throw std::invalid_argument("build_schedule: sigma must lie in (0,1)");
  s.p = ov.p.value_or(s.sigma / std::sqrt(static_cast<double>(n)));
  if (!(s.p >= 0.0 && s.p <= 1.0))
    throw std::invalid_argument("build_schedule: p must lie in [0,1]");

  s.steps = ov.steps.value_or(
      static_cast<int>(std::ceil(std::pow(static_cast<double>(n), s.beta))));
  if (s.steps < 1) throw std::invalid_argument("build_schedule: steps must be >= 1");

  s.rho = std::sqrt(s.beta * logn / n);

  long long cap = n / 2;
  long long s_formula =
      ov.s ? *ov.s : static_cast<long long>(std::ceil(s.C * std::sqrt(n * logn)));
  if (s_formula < 1) throw std::invalid_argument("build_schedule: s must be >= 1");
  s.s_capped = s_formula > cap;
  s.s = s.s_capped ? cap : s_formula;

  s.q.resize(s.steps + 1);
  s.pi.resize(s.steps + 1);
  s.tau.resize(s.steps + 1);
  s.q[0] = 1.0;
  s.pi[0] = s.sigma;
  double y = 0.0;
  for (int i = 1; i <= s.steps; ++i) {
    double x = i * s.sigma;
    if (x > kPsiMaxX) throw std::range_error("build_schedule: I*sigma out of psi range");
    y = invert_growth_integral(x, y);
    s.q[i] = std::exp(-y * y);
    s.pi[i] = s.pi[i - 1] + s.sigma * s.q[i - 1];
  }
  for (int i = 0; i <= s.steps; ++i)
    s.tau[i] = 1.0 - s.delta * s.pi[i] / (2.0 * s.pi[s.steps]);

  double s0_raw = std::floor(s.sigma * s.sigma * s.sigma * s.sigma * s.q[s.steps] *
                             s.q[s.steps] * static_cast<double>(s.s));
  s.s0_feasible = s0_raw >= 1.0;
  s.s0 = s.s0_feasible ? static_cast<long long>(s0_raw) : 1;

  s.overrides = ov;
  return s;
}

double stabilization_prob(const Schedule& sched, int i, double y_e) {
  if (i < 0 || i >= sched.steps)
    throw std::out_of_range("stabilization_prob: step index outside [0, steps)");
  if (y_e < 0.0) throw std::invalid_argument("stabilization_prob: y_e must be >= 0");
  double gap = sched.closure_threshold(i) - y_e;
  if (gap <= 0.0) return 0.0;
  return 1.0 - std::pow(1.0 - sched.p, gap);
}

}  // namespace nibblepack
