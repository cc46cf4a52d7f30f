#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shelab/models/scalar_model.hpp"

namespace shelab::models {

/// Pinned tolerances for the condition checkers.
struct Tolerances {
  static constexpr double identity_rel = 1e-8;
  static constexpr double quadrature_rel = 1e-6;
  static constexpr double inequality_abs = 1e-9;
};

enum class OsgoodClass { convergent, divergent, inconclusive };
std::string to_string(OsgoodClass c);

struct QuadratureBudget {
  int max_doublings = 1100;  // upper limit lower * 2^k stays below upper_cap anyway
  double rel_tol = 1e-10;    // tail estimate relative to the partial integral
  double upper_cap = 1e300;
};

/// Result of classifying int_lower^inf du / h(u).
struct OsgoodVerdict {
  OsgoodClass classification = OsgoodClass::inconclusive;
  double partial_integral = 0.0;
  double explored_upper_limit = 0.0;
  std::optional<double> value;  // convergent: partial plus geometric tail estimate
  double tail_estimate = 0.0;
  double last_increment_ratio = 0.0;
  // rho(u) = u log u loglog u / h(u) at the ends of the comparison grid
  double comparison_ratio_first = 0.0;
  double comparison_ratio_last = 0.0;
  std::string tail_evidence;
};

/// Doubling partial integrals with Gauss-Kronrod on each [a, 2a], plus a
/// comparison against 1/(u log u loglog u). Throws PreconditionError when h
/// is not positive on the explored range or lower < 1.
OsgoodVerdict osgood_classify(const ScalarFunctionModel& h, double lower = 1.0, QuadratureBudget budget = {});

struct ConvexityResult {
  double max_ratio = 0.0;
  double argmax = 0.0;
  bool pass = true;
};

/// sup over the grid of h h'' / h'^2; pass when it is at most 2 (plus slack).
/// Throws SingularPointError where h' vanishes.
ConvexityResult convexity_ratio_check(const ScalarFunctionModel& h, std::span<const double> grid);

enum class AssumptionCase { a, b };
enum class Verdict { satisfied, violated, inconclusive };
std::string to_string(AssumptionCase c);
std::string to_string(Verdict v);

struct Witness {
  std::string condition;  // "b-upper", "sigma-lower", "sigma-upper", "convexity", "osgood", "growth"
  double u = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct AssumptionReport {
  AssumptionCase which = AssumptionCase::a;
  Verdict verdict = Verdict::inconclusive;
  std::vector<Witness> witnesses;
  Interval checked_range;
  std::string notes;

  // case (a) certificate
  double theta_user = 0.0;
  double theta_fitted = 0.0;
  double theta_used = 0.0;
  double tail_start = 0.0;           // u* where the lower sigma bound starts to hold
  double h_scale_headroom = 0.0;     // largest lambda with lambda*h still below sigma^2 at the probes
  std::optional<double> admissible_amplitude;  // A * headroom when h is a power family
  double drift_constant = 0.0;       // 2 pi theta_used, the constant of the log-ledger drift bound
  double sigma_constant_fitted = 0.0;  // smallest C for the upper sigma bound on the samples

  // case (b)
  std::optional<OsgoodVerdict> osgood;

  bool has_violation() const;
};

/// Sample counts for the checkers.
struct SamplePlan {
  int range_points = 400;
  int asymptotic_probes = 60;
  double probe_limit = 1e100;
};

/// Case (a). h is an optional so a missing h can be reported as a
/// precondition error rather than silently defaulted.
AssumptionReport check_assumption_a(const ScalarFunctionModel& b, const ScalarFunctionModel& sigma,
                                    const std::optional<ScalarFunctionModel>& h, double theta, double C,
                                    Interval range = {0.0, 1e6}, SamplePlan plan = {});

AssumptionReport check_assumption_b(const ScalarFunctionModel& b, const ScalarFunctionModel& sigma,
                                    const std::optional<ScalarFunctionModel>& h, double c, double C, double gamma,
                                    Interval range = {0.0, 1e6}, SamplePlan plan = {});

/// The two alternative sigma conditions of the Osgood-regime corollary. The
/// small-noise branch takes the range exponent (must lie in (0, 1/4)) and the
/// exponent used inside the bound |sigma| <= C1 (1 + |u|^{1-e} h(|u|)^e) as
/// separate inputs.
struct CorollaryInputs {
  double c0 = 1.0, C0 = 1.0, gamma0 = 0.75;
  double gamma1 = 0.2, C1 = 1.0, bound_exponent = 0.2;
};

struct CorollaryReport {
  Verdict growth_branch = Verdict::inconclusive;
  Verdict small_noise_branch = Verdict::inconclusive;
  Verdict verdict = Verdict::inconclusive;
  std::vector<Witness> witnesses;
  std::optional<OsgoodVerdict> osgood;
};

CorollaryReport check_corollary(const ScalarFunctionModel& b, const ScalarFunctionModel& sigma,
                                const ScalarFunctionModel& h, CorollaryInputs in, Interval range = {0.0, 1e6},
                                SamplePlan plan = {});

struct JensenResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

/// lhs = int h(v), rhs = 2 pi int (v + 1/(2 pi)) h(v) / (1 + int v), by the
/// periodic trapezoid rule (dx = 2 pi / v.size()).
JensenResult jensen_check(const ScalarFunctionModel& h, std::span<const double> v);

/// Log-spaced grid of n points on [lo, hi], lo > 0.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace shelab::models
