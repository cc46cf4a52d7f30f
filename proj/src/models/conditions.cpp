#include "shelab/models/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "shelab/errors.hpp"

namespace shelab::models {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSlack = Tolerances::inequality_abs;

double slack_for(double rhs) { return kSlack * std::max(1.0, std::abs(rhs)); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Keeps the worst witness per condition plus the first few violations.
class WitnessLog {
 public:
  void add(const std::string& cond, double u, double lhs, double rhs) {
    const bool bad = lhs > rhs + slack_for(rhs);
    const double margin = (lhs - rhs) / std::max(1.0, std::abs(rhs));
    auto& w = worst_[cond];
    if (!w.set || margin > w.margin) w = {true, margin, Witness{cond, u, lhs, rhs, bad}};
    if (bad && violations_[cond] < 8) {
      ++violations_[cond];
      out_.push_back(Witness{cond, u, lhs, rhs, true});
    }
    if (bad) any_bad_[cond] = true;
  }
  bool violated(const std::string& cond) const { return any_bad_.count(cond) > 0; }
  std::vector<Witness> finish() const {
    std::vector<Witness> all = out_;
    for (const auto& [cond, w] : worst_)
      if (!w.w.violated) all.push_back(w.w);
    return all;
  }

 private:
  struct Worst {
    bool set = false;
    double margin = 0.0;
    Witness w;
  };
  std::map<std::string, Worst> worst_;
  std::map<std::string, int> violations_;
  std::map<std::string, bool> any_bad_;
  std::vector<Witness> out_;
};

// Points u >= 0 where a condition in |u| is checked, sorted ascending.
std::vector<double> range_samples(Interval range, const SamplePlan& plan) {
  std::vector<double> pts{0.0};
  const double lo = std::max(range.lo, 1e-6);
  for (double x : log_grid(lo, range.hi, plan.range_points)) pts.push_back(x);
  return pts;
}

std::vector<double> probe_samples(Interval range, const SamplePlan& plan) {
  auto g = log_grid(range.hi, plan.probe_limit, plan.asymptotic_probes + 1);
  g.erase(g.begin());
  return g;
}

// The signed points at which a model on its own domain is evaluated for |u| = x.
std::vector<double> signed_points(double x, const ScalarFunctionModel& m1, const ScalarFunctionModel& m2) {
  if (x == 0.0) return {0.0};
  if (m1.domain() == Domain::full_line && m2.domain() == Domain::full_line) return {x, -x};
  return {x};
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw PreconditionError("log_grid: need 0 < lo <= hi and n >= 1");
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::string to_string(OsgoodClass c) {
  switch (c) {
    case OsgoodClass::convergent: return "convergent";
    case OsgoodClass::divergent: return "divergent";
    case OsgoodClass::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(AssumptionCase c) { return c == AssumptionCase::a ? "a" : "b"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

bool AssumptionReport::has_violation() const {
  return std::any_of(witnesses.begin(), witnesses.end(), [](const Witness& w) { return w.violated; });
}

OsgoodVerdict osgood_classify(const ScalarFunctionModel& h, double lower, QuadratureBudget budget) {
  if (!(lower >= 1.0)) throw PreconditionError("osgood_classify: lower limit must be at least 1");
  auto inv = [&](double u) {
    const double hv = h.value(u);
    if (!(hv > 0.0)) {
      std::ostringstream os;
      os << "osgood_classify: h is not positive at u = " << u;
      throw PreconditionError(os.str());
    }
    return 1.0 / hv;
  };
  inv(lower);

  OsgoodVerdict out;
  double a = lower;
  double partial = 0.0;
  double prev = -1.0;
  double ratio = 0.0;
  double tail = std::numeric_limits<double>::infinity();
  int stable = 0;
  bool converged = false;
  for (int k = 0; k < budget.max_doublings; ++k) {
    const double b = 2.0 * a;
    if (b > budget.upper_cap) break;
    double err = 0.0;
    const double d = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(inv, a, b, 10, 1e-13, &err);
    partial += d;
    if (prev > 0.0) ratio = d / prev;
    if (d == 0.0) {
      tail = 0.0;
    } else if (prev > 0.0 && ratio < 1.0 - 1e-3) {
      tail = d * ratio / (1.0 - ratio);
    } else {
      tail = std::numeric_limits<double>::infinity();
    }
    stable = (tail <= budget.rel_tol * partial) ? stable + 1 : 0;
    prev = d;
    a = b;
    if (stable >= 3) {
      converged = true;
      break;
    }
  }
  out.partial_integral = partial;
  out.explored_upper_limit = a;
  out.tail_estimate = tail;
  out.last_increment_ratio = ratio;

  // Comparison with the borderline divergent integrand 1/(u log u loglog u)
  // on a grid equispaced in loglog u, starting at u = e^e.
  const double s0 = std::max(1.0, std::log(std::log(std::max(lower, std::exp(std::numbers::e)))));
  const double s1 = std::log(std::log(a));
  bool rho_divergent = false;
  std::string cmp;
  if (s1 - s0 >= 2.0) {
    auto rho = [&](double s) {
      const double l1 = std::exp(s);
      const double u = std::exp(l1);
      return u * l1 * s / h.value(u);
    };
    out.comparison_ratio_first = rho(s0);
    out.comparison_ratio_last = rho(s1);
    rho_divergent = out.comparison_ratio_first > 0.0 &&
                    out.comparison_ratio_last >= 0.5 * out.comparison_ratio_first;
    cmp = "u log u loglog u / h(u) went from " + fmt(out.comparison_ratio_first) + " to " +
          fmt(out.comparison_ratio_last) + " over u in [e^e, " + fmt(a) + "]";
  } else {
    cmp = "comparison range too short";
  }

  if (converged && !rho_divergent) {
    out.classification = OsgoodClass::convergent;
    out.value = partial + tail;
    out.tail_evidence = "doubling increments decay geometrically (ratio " + fmt(ratio) +
                        "), tail estimate " + fmt(tail) + "; " + cmp;
  } else if (!converged && rho_divergent) {
    out.classification = OsgoodClass::divergent;
    out.tail_evidence = "partial integrals keep growing up to " + fmt(a) + " (last doubling ratio " + fmt(ratio) +
                        "); 1/h dominates a multiple of 1/(u log u loglog u): " + cmp;
  } else {
    out.classification = OsgoodClass::inconclusive;
    out.tail_evidence = std::string(converged ? "partial integrals converged" : "partial integrals not converged") +
                        " but comparison " + (rho_divergent ? "suggests divergence" : "does not support divergence") +
                        ": " + cmp;
  }
  return out;
}

ConvexityResult convexity_ratio_check(const ScalarFunctionModel& h, std::span<const double> grid) {
  ConvexityResult r;
  r.max_ratio = -std::numeric_limits<double>::infinity();
  for (double u : grid) {
    const Jet j = h.jet(u);
    if (j.d1 == 0.0) {
      std::ostringstream os;
      os << "h'(u) vanishes at u = " << u;
      throw SingularPointError(u, os.str());
    }
    const double q = j.v * j.d2 / (j.d1 * j.d1);
    if (q > r.max_ratio) {
      r.max_ratio = q;
      r.argmax = u;
    }
  }
  r.pass = r.max_ratio <= 2.0 + kSlack;
  return r;
}

AssumptionReport check_assumption_a(const ScalarFunctionModel& b, const ScalarFunctionModel& sigma,
                                    const std::optional<ScalarFunctionModel>& h_opt, double theta, double C,
                                    Interval range, SamplePlan plan) {
  if (!h_opt) throw PreconditionError("check_assumption_a: a dominating function h is required");
  if (!(theta > 0.0) || !(C > 0.0)) throw PreconditionError("check_assumption_a: theta and C must be positive");
  if (range.lo > 0.0 || range.hi < 1e6) throw PreconditionError("check_assumption_a: range must cover [0, 1e6]");
  const ScalarFunctionModel& h = *h_opt;

  AssumptionReport rep;
  rep.which = AssumptionCase::a;
  rep.checked_range = range;
  rep.theta_user = theta;
  std::ostringstream notes;

  const auto base = range_samples(range, plan);
  auto probes = probe_samples(range, plan);
  std::vector<double> all = base;
  all.insert(all.end(), probes.begin(), probes.end());

  // Drop probes where any quantity overflows.
  struct Row {
    double x;
    double hx;
    double b_abs[2];
    double s2[2];
    int n;
    bool probe;
    double u(int k) const { return k == 0 ? x : -x; }  // signed_points order
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const double x = all[i];
    Row r{x, h.evaluate(x, 0), {0, 0}, {0, 0}, 0, i >= base.size()};
    for (double u : signed_points(x, b, sigma)) {
      r.b_abs[r.n] = std::abs(b.evaluate(u, 0));
      const double s = sigma.evaluate(u, 0);
      r.s2[r.n] = s * s;
      ++r.n;
    }
    bool finite = std::isfinite(r.hx) && std::isfinite((1.0 / (2 * kPi) + x) * r.hx);
    for (int k = 0; k < r.n; ++k) finite = finite && std::isfinite(r.b_abs[k]) && std::isfinite(r.s2[k]);
    if (!finite) {
      if (!r.probe) throw PreconditionError("check_assumption_a: non-finite model value inside the range at u = " + fmt(x));
      notes << "probes stop at u = " << fmt(x) << " (overflow); ";
      break;
    }
    rows.push_back(r);
  }
  if (b.domain() == Domain::half_line || sigma.domain() == Domain::half_line)
    notes << "b or sigma declared on the half line, negative u not checked; ";

  // Tail start: after the last sample failing the lower sigma bound.
  std::ptrdiff_t last_fail = -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const double lhs = (1.0 / (2 * kPi) + r.x) * r.hx;
    for (int k = 0; k < r.n; ++k)
      if (lhs > r.s2[k] / (4 * kPi) + slack_for(r.s2[k] / (4 * kPi))) last_fail = static_cast<std::ptrdiff_t>(i);
  }

  // Headroom lambda: largest factor on h keeping the lower bound at all probes.
  double headroom = std::numeric_limits<double>::infinity();
  for (const Row& r : rows) {
    if (!r.probe) continue;
    const double lhs = (1.0 / (2 * kPi) + r.x) * r.hx;
    if (lhs <= 0.0) continue;
    for (int k = 0; k < r.n; ++k) headroom = std::min(headroom, r.s2[k] / (4 * kPi) / lhs);
  }
  rep.h_scale_headroom = headroom;
  if (auto A = h.param("A"); A && h.spec() && h.spec()->family == Family::power && std::isfinite(headroom))
    rep.admissible_amplitude = *A * headroom;

  WitnessLog log;
  const bool lower_fails_at_end = last_fail == static_cast<std::ptrdiff_t>(rows.size()) - 1;
  double ustar = 0.0;
  double h_star = 0.0;
  double dh_star = 0.0;
  bool shifted = false;
  if (lower_fails_at_end) {
    const Row& r = rows.back();
    const double lhs = (1.0 / (2 * kPi) + r.x) * r.hx;
    for (int k = 0; k < r.n; ++k) log.add("sigma-lower", r.u(k), lhs, r.s2[k] / (4 * kPi));
    notes << "lower sigma bound fails at the largest probe, no tail certificate; ";
  } else if (last_fail >= 0) {
    ustar = rows[static_cast<std::size_t>(last_fail) + 1].x;
    const Jet j = h.jet(ustar);
    h_star = j.v;
    dh_star = j.d1;
    shifted = true;
    notes << "h replaced by h minus its tangent at u* = " << fmt(ustar) << "; ";
  }
  rep.tail_start = ustar;

  auto htil = [&](double x, double hx) {
    if (!shifted) return hx;
    if (x <= ustar) return 0.0;
    return std::max(0.0, hx - h_star - dh_star * (x - ustar));
  };

  // theta fitted on samples; growth at the top probes means no finite theta
  std::vector<double> ratio(rows.size(), 0.0);
  double theta_fit = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const double ht = htil(r.x, r.hx);
    double q = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < r.n; ++k) q = std::max(q, (r.b_abs[k] - ht) / (1.0 + r.x));
    ratio[i] = q;
    theta_fit = std::max(theta_fit, q);
  }
  bool theta_unbounded = false;
  if (!probes.empty() && rows.size() > base.size() + 2) {
    const std::size_t last = rows.size() - 1;
    const std::size_t mid = base.size() + (last - base.size()) / 2;
    theta_unbounded = ratio[last] > 0.0 && ratio[last] > 1.5 * std::max(ratio[mid], 0.0);
  }
  rep.theta_fitted = theta_fit;
  rep.theta_used = theta_unbounded ? theta : std::max(theta, theta_fit);
  rep.drift_constant = 2.0 * kPi * rep.theta_used;

  double c_fit = 0.0;
  for (const Row& r : rows) {
    const double ht = htil(r.x, r.hx);
    const double lhs_low = (1.0 / (2 * kPi) + r.x) * ht;
    for (int k = 0; k < r.n; ++k) {
      log.add("b-upper", r.u(k), r.b_abs[k], rep.theta_used * (1.0 + r.x) + ht);
      if (!lower_fails_at_end) log.add("sigma-lower", r.u(k), lhs_low, r.s2[k] / (4 * kPi));
      log.add("sigma-upper", r.u(k), r.s2[k] / (4 * kPi), C * (1.0 + r.x * r.x * r.x));
      c_fit = std::max(c_fit, r.s2[k] / (4 * kPi) / (1.0 + r.x * r.x * r.x));
    }
  }
  rep.sigma_constant_fitted = c_fit;
  if (theta_unbounded) notes << "(|b| - h)/(1+|u|) still growing at the largest probes; ";

  // Convexity of the certified h on u > u*.
  bool singular = false;
  {
    std::vector<double> grid;
    for (const Row& r : rows)
      if (r.x > ustar && r.x > 0.0) grid.push_back(r.x);
    double worst = -std::numeric_limits<double>::infinity();
    double arg = 0.0;
    try {
      if (!shifted) {
        const auto cr = convexity_ratio_check(h, grid);
        worst = cr.max_ratio;
        arg = cr.argmax;
      } else {
        for (double x : grid) {
          const Jet j = h.jet(x);
          const double v = std::max(0.0, j.v - h_star - dh_star * (x - ustar));
          const double d1 = j.d1 - dh_star;
          if (d1 == 0.0) throw SingularPointError(x, "tangent-shifted h has zero slope");
          const double q = v * j.d2 / (d1 * d1);
          if (q > worst) {
            worst = q;
            arg = x;
          }
        }
      }
      if (!grid.empty()) log.add("convexity", arg, worst, 2.0);
    } catch (const SingularPointError& e) {
      singular = true;
      notes << "convexity check hit a singular point at u = " << fmt(e.point()) << "; ";
    }
  }

  rep.witnesses = log.finish();
  const bool bad = rep.has_violation();
  if (bad) rep.verdict = Verdict::violated;
  else if (singular || theta_unbounded) rep.verdict = Verdict::inconclusive;
  else rep.verdict = Verdict::satisfied;
  notes << "theta fitted " << fmt(theta_fit) << ", used " << fmt(rep.theta_used);
  rep.notes = notes.str();
  return rep;
}

AssumptionReport check_assumption_b(const ScalarFunctionModel& b, const ScalarFunctionModel& sigma,
                                    const std::optional<ScalarFunctionModel>& h_opt, double c, double C, double gamma,
                                    Interval range, SamplePlan plan) {
  if (!(gamma > 0.5 && gamma < 1.0)) throw ParameterError("check_assumption_b: gamma must lie in (1/2, 1)");
  if (!h_opt) throw PreconditionError("check_assumption_b: a dominating function h is required");
  if (!(c > 0.0) || !(C > 0.0)) throw PreconditionError("check_assumption_b: c and C must be positive");
  const ScalarFunctionModel& h = *h_opt;

  AssumptionReport rep;
  rep.which = AssumptionCase::b;
  rep.checked_range = range;
  std::ostringstream notes;
  WitnessLog log;

  std::vector<double> pts{0.0};
  for (double x : log_grid(std::max(range.lo, 1e-3), range.hi, plan.range_points)) pts.push_back(x);
  for (double x : pts) {
    const double hx = h.evaluate(x, 0);
    for (double u : signed_points(x, b, sigma)) {
      log.add("b-upper", x, std::abs(b.evaluate(u, 0)), hx);
      const double s = sigma.evaluate(u, 0);
      log.add("sigma-lower", u, c * std::pow(x, 2.0 * gamma), s * s);
      log.add("sigma-upper", u, s * s, C * (1.0 + x * x * x));
    }
  }

  bool inconclusive = false;
  const OsgoodVerdict ov = osgood_classify(h, 1.0);
  rep.osgood = ov;
  if (ov.classification == OsgoodClass::convergent) {
    // int 1/h < inf: record 1/value > 0 as the failed divergence requirement
    log.add("osgood", ov.explored_upper_limit, 1.0 / *ov.value, 0.0);
  } else if (ov.classification == OsgoodClass::inconclusive) {
    inconclusive = true;
    notes << "Osgood classification inconclusive; ";
  }

  // h(u^2) / u^{2 gamma + 1} along u = 10^j
  std::vector<double> r;
  std::vector<double> us;
  for (int j = 1; j <= 150; ++j) {
    const double u = std::pow(10.0, j);
    const double v = h.value(u * u);
    if (!std::isfinite(v)) break;
    r.push_back(std::exp(std::log(v) - (2.0 * gamma + 1.0) * std::log(u)));
    us.push_back(u);
  }
  if (r.size() < 9) {
    inconclusive = true;
    notes << "growth ratio sequence too short; ";
  } else {
    const std::size_t start = r.size() - r.size() / 3;
    bool decreasing = true;
    for (std::size_t i = start + 1; i < r.size(); ++i) decreasing = decreasing && r[i] <= r[i - 1] * (1.0 + 1e-12);
    const double peak = *std::max_element(r.begin(), r.end());
    if (decreasing && r.back() <= 1e-3 * peak) {
      log.add("growth", us.back(), r.back(), 1e-3 * peak);
    } else if (r.back() > r[start]) {
      log.add("growth", us.back(), r.back(), r[start]);
      notes << "h(u^2)/u^(2 gamma+1) increasing along the tail; ";
    } else {
      inconclusive = true;
      notes << "h(u^2)/u^(2 gamma+1) decreasing but not yet small; ";
    }
  }

  rep.witnesses = log.finish();
  if (rep.has_violation()) rep.verdict = Verdict::violated;
  else if (inconclusive) rep.verdict = Verdict::inconclusive;
  else rep.verdict = Verdict::satisfied;
  notes << "Osgood: " << to_string(ov.classification);
  rep.notes = notes.str();
  return rep;
}

CorollaryReport check_corollary(const ScalarFunctionModel& b, const ScalarFunctionModel& sigma,
                                const ScalarFunctionModel& h, CorollaryInputs in, Interval range, SamplePlan plan) {
  if (!(in.gamma0 > 0.5)) throw ParameterError("check_corollary: gamma0 must exceed 1/2");
  if (!(in.gamma1 > 0.0 && in.gamma1 < 0.25)) throw ParameterError("check_corollary: gamma1 must lie in (0, 1/4)");
  if (!(in.bound_exponent > 0.0 && in.bound_exponent < 1.0))
    throw ParameterError("check_corollary: bound exponent must lie in (0, 1)");

  CorollaryReport rep;
  WitnessLog common;
  WitnessLog growth;
  WitnessLog small;
  std::vector<double> pts{0.0};
  for (double x : log_grid(std::max(range.lo, 1e-3), range.hi, plan.range_points)) pts.push_back(x);
  for (double x : pts) {
    const double hx = h.evaluate(x, 0);
    for (double u : signed_points(x, b, sigma)) {
      common.add("b-upper", x, std::abs(b.evaluate(u, 0)), hx);
      const double s = std::abs(sigma.evaluate(u, 0));
      growth.add("sigma-lower", u, in.c0 * std::pow(x, in.gamma0), s);
      growth.add("sigma-upper", u, s, in.C0 * (1.0 + std::pow(x, 1.5)));
      const double e = in.bound_exponent;
      small.add("sigma-small", u, s, in.C1 * (1.0 + std::pow(x, 1.0 - e) * std::pow(hx, e)));
    }
  }
  const OsgoodVerdict ov = osgood_classify(h, 1.0);
  rep.osgood = ov;
  auto branch = [](const WitnessLog& w, std::initializer_list<const char*> conds) {
    for (const char* c : conds)
      if (w.violated(c)) return Verdict::violated;
    return Verdict::satisfied;
  };
  rep.growth_branch = branch(growth, {"sigma-lower", "sigma-upper"});
  rep.small_noise_branch = branch(small, {"sigma-small"});
  for (const auto* w : {&common, &growth, &small})
    for (const auto& x : w->finish()) rep.witnesses.push_back(x);
  if (common.violated("b-upper") || ov.classification == OsgoodClass::convergent) {
    rep.verdict = Verdict::violated;
  } else if (rep.growth_branch == Verdict::violated && rep.small_noise_branch == Verdict::violated) {
    rep.verdict = Verdict::violated;
  } else if (ov.classification == OsgoodClass::inconclusive) {
    rep.verdict = Verdict::inconclusive;
  } else {
    rep.verdict = Verdict::satisfied;
  }
  return rep;
}

JensenResult jensen_check(const ScalarFunctionModel& h, std::span<const double> v) {
  if (v.empty()) throw PreconditionError("jensen_check: empty grid function");
  const double dx = 2.0 * kPi / static_cast<double>(v.size());
  double mass = 0.0;
  double lhs = 0.0;
  double weighted = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw PreconditionError("jensen_check: grid function must be nonnegative");
    const double hx = h.value(x);
    mass += x;
    lhs += hx;
    weighted += (x + 1.0 / (2.0 * kPi)) * hx;
  }
  JensenResult r;
  r.lhs = dx * lhs;
  r.rhs = 2.0 * kPi * dx * weighted / (1.0 + dx * mass);
  r.pass = r.lhs <= r.rhs + kSlack * std::max(1.0, std::abs(r.rhs));
  return r;
}

}  // namespace shelab::models
