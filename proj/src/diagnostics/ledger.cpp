#include "shelab/diagnostics/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "shelab/errors.hpp"

namespace shelab::diagnostics {

double SemimartingaleLedger::closure_error() const {
  if (I.empty()) return 0.0;
  double acc = I.front();
  double worst = 0.0;
  for (std::size_t k = 0; k < dB.size(); ++k) {
    acc += dB[k] + dA[k] + dN[k];
    worst = std::max(worst, std::abs(I[k + 1] - acc));
  }
  return worst;
}

double SemimartingaleLedger::sup_I() const {
  return I.empty() ? 0.0 : *std::max_element(I.begin(), I.end());
}

double SemimartingaleLedger::total(const std::vector<double>& increments) const {
  double s = 0.0;
  for (double x : increments) s += x;
  return s;
}

void LedgerAccumulator::start(const spde::FieldState& s) {
  ledger_ = {};
  qv_ = 0.0;
  ledger_.times.push_back(s.t());
  ledger_.I.push_back(s.integral());
}

void LedgerAccumulator::add(double t_next, double I_before, double I_after, const spde::StepTerms& terms) {
  auto& L = ledger_;
  const double dn = (I_after - I_before) - terms.drift - terms.positivity;
  qv_ += dn * dn;
  L.times.push_back(t_next);
  L.I.push_back(I_after);
  L.dB.push_back(terms.drift);
  L.dA.push_back(terms.positivity);
  L.dS.push_back(terms.variance);
  L.dN.push_back(dn);
  L.QV.push_back(qv_);
  const double den = 1.0 + I_before;
  L.log_B.push_back(terms.drift / den);
  L.log_A.push_back(terms.positivity / den);
  L.log_S.push_back(terms.variance / (2.0 * den * den));
}

void LedgerAccumulator::observe(const spde::FieldState& before, const spde::FieldState& after,
                                const spde::StepTerms& terms) {
  if (ledger_.I.empty()) start(before);
  add(after.t(), before.integral(), after.integral(), terms);
}

SemimartingaleLedger ledger_build(const spde::Trajectory& tr, const models::ScalarFunctionModel& b,
                                  const models::ScalarFunctionModel& sigma, double alpha, double eps_floor) {
  if (!tr.has_every_step_snapshots() || tr.snapshots.size() < 2)
    throw InsufficientDataError("ledger needs a field snapshot at every step");
  spde::SolverConfig cfg = tr.header.config;
  const spde::Stepper eval(cfg, b, sigma, tr.header.refine_level);
  const spde::ExtraDrift extra = tr.header.extra;
  LedgerAccumulator acc;
  acc.start(tr.snapshots.front());
  for (std::size_t k = 0; k + 1 < tr.snapshots.size(); ++k) {
    const auto& s0 = tr.snapshots[k];
    const auto& s1 = tr.snapshots[k + 1];
    const double dt = s1.t() - s0.t();
    const double dx = s0.dx();
    spde::StepTerms terms;
    double sb = 0.0, sa = 0.0, ss = 0.0;
    for (double u : s0.values()) {
      double drift, sig;
      if (extra == spde::ExtraDrift::negated_reflection) {
        drift = -eval.drift_at(-u);
        sig = -eval.sigma_at(-u);
      } else {
        drift = eval.drift_at(u);
        sig = eval.sigma_at(u);
      }
      sb += drift;
      ss += sig * sig;
      if (extra != spde::ExtraDrift::none) sa += std::pow(std::max(u, eps_floor), -alpha);
    }
    terms.drift = dt * dx * sb;
    terms.positivity = dt * dx * sa;
    terms.variance = dt * dx * ss;
    acc.add(s1.t(), s0.integral(), s1.integral(), terms);
  }
  return acc.take();
}

BoundCheck drift_bound_check_a(const SemimartingaleLedger& ledger, double C) {
  BoundCheck out;
  out.constant = C;
  out.max_excess = -std::numeric_limits<double>::infinity();
  double cum = 0.0;
  for (std::size_t k = 0; k < ledger.steps(); ++k) {
    cum += ledger.log_B[k] - ledger.log_S[k];
    const double t = ledger.times[k + 1] - ledger.times.front();
    const double excess = cum - C * t;
    if (excess > out.max_excess) {
      out.max_excess = excess;
      out.at_time = t;
    }
  }
  if (ledger.steps() == 0) out.max_excess = 0.0;
  out.pass = out.max_excess <= models::Tolerances::inequality_abs * std::max(1.0, C * out.at_time);
  return out;
}

BoundCheck drift_bound_check_a(const SemimartingaleLedger& ledger, const models::AssumptionReport& report) {
  return drift_bound_check_a(ledger, report.drift_constant);
}

std::vector<DoobRow> doob_bound_check(std::span<const double> sup_I, std::span<const double> M_grid,
                                      const DoobInputs& in) {
  const double R = static_cast<double>(sup_I.size());
  if (sup_I.empty()) throw InsufficientDataError("doob_bound_check needs at least one path");
  const double extra = (in.C + 2.0 * std::numbers::pi * std::pow(in.eps, -in.alpha)) * in.horizon;
  auto G = [&](double x) { return x <= 1.0 ? 0.0 : models::capital_G(in.g, in.gamma, x); };
  std::vector<DoobRow> rows;
  for (double M : M_grid) {
    DoobRow r;
    r.M = M;
    r.paths = sup_I.size();
    r.exceed = static_cast<std::size_t>(std::count_if(sup_I.begin(), sup_I.end(), [&](double s) { return s > M; }));
    r.frequency = static_cast<double>(r.exceed) / R;
    double num, den;
    if (in.case_b) {
      num = G(std::log1p(in.initial_l1)) + extra;
      den = G(std::log1p(M));
    } else {
      num = std::log1p(in.initial_l1) + extra;
      den = std::log1p(M);
    }
    r.bound = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
    r.vacuous = r.bound >= 1.0;
    const double p = std::clamp(r.bound, 0.0, 1.0);
    r.se = std::sqrt(p * (1.0 - p) / R);
    r.pass = r.vacuous || r.frequency <= r.bound + 3.0 * r.se;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace shelab::diagnostics
