#pragma once

#include <vector>

#include "shelab/models/conditions.hpp"
#include "shelab/spde/simulate.hpp"

namespace shelab::diagnostics {

/// Per-step decomposition of I(t) = dx * sum v. Vectors of increments have
/// one entry per step; `I` and `times` have one more (the initial value).
struct SemimartingaleLedger {
  std::vector<double> times;
  std::vector<double> I;
  std::vector<double> dB;  // drift
  std::vector<double> dA;  // positivity drift
  std::vector<double> dS;  // sigma^2 integral
  std::vector<double> dN;  // residual
  std::vector<double> QV;  // running sum of dN^2
  // log(1 + I) terms
  std::vector<double> log_B;  // dB / (1 + I)
  std::vector<double> log_A;  // dA / (1 + I)
  std::vector<double> log_S;  // dS / (2 (1 + I)^2)

  std::size_t steps() const { return dB.size(); }
  /// max_k |I_k - I_0 - sum_{j<k} (dB + dA + dN)|
  double closure_error() const;
  double sup_I() const;
  double total(const std::vector<double>& increments) const;
};

/// Builds the ledger step by step; shared by the online observer and the
/// offline builder.
class LedgerAccumulator {
 public:
  void start(const spde::FieldState& s);
  void add(double t_next, double I_before, double I_after, const spde::StepTerms& terms);
  /// StepObserver adaptor
  void observe(const spde::FieldState& before, const spde::FieldState& after, const spde::StepTerms& terms);
  const SemimartingaleLedger& ledger() const { return ledger_; }
  SemimartingaleLedger take() { return std::move(ledger_); }

 private:
  SemimartingaleLedger ledger_;
  double qv_ = 0.0;
};

/// Offline ledger from a trajectory carrying a snapshot at every step.
/// Throws InsufficientDataError otherwise.
SemimartingaleLedger ledger_build(const spde::Trajectory& tr, const models::ScalarFunctionModel& b,
                                  const models::ScalarFunctionModel& sigma, double alpha, double eps_floor);

struct BoundCheck {
  double max_excess = 0.0;  // max_k (B_k - S_k - C t_k), <= 0 when the bound holds
  double at_time = 0.0;
  double constant = 0.0;
  bool pass = true;
};

/// Cumulative log-ledger B - S against C t with C = drift_constant of the
/// case (a) report.
BoundCheck drift_bound_check_a(const SemimartingaleLedger& ledger, const models::AssumptionReport& report);
BoundCheck drift_bound_check_a(const SemimartingaleLedger& ledger, double C);

struct DoobInputs {
  double initial_l1 = 0.0;
  double C = 0.0;
  double eps = 1e-3;
  double alpha = 4.0;
  double horizon = 1.0;
  // case (b): bound uses G from capital_G(g, gamma, .)
  bool case_b = false;
  models::ScalarFunctionModel g;
  double gamma = 0.75;
};

struct DoobRow {
  double M = 0.0;
  std::size_t paths = 0;
  std::size_t exceed = 0;
  double frequency = 0.0;
  double bound = 0.0;
  double se = 0.0;
  bool vacuous = false;
  bool pass = true;
};

/// Empirical P(sup I > M) against the displayed bound, per M. A row passes
/// when frequency <= bound + 3 binomial standard errors (evaluated at
/// p = min(bound, 1)); bounds >= 1 pass trivially.
std::vector<DoobRow> doob_bound_check(std::span<const double> sup_I, std::span<const double> M_grid,
                                      const DoobInputs& in);

}  // namespace shelab::diagnostics
