// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [N ...]
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "shelab/diagnostics/audits.hpp"
#include "shelab/diagnostics/explosion.hpp"
#include "shelab/diagnostics/ledger.hpp"
#include "shelab/diagnostics/lemmas.hpp"
#include "shelab/experiments/campaigns.hpp"
#include "shelab/io/serialize.hpp"
#include "shelab/models/conditions.hpp"
#include "shelab/spde/heat_kernel.hpp"
#include "shelab/spde/simulate.hpp"
#include "shelab/spde/spectral.hpp"

using namespace shelab;
using Model = models::ScalarFunctionModel;
using models::Domain;
using models::Symmetry;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kMassTol = 1e-8;
constexpr double kSeriesImageTol = 1e-10;
constexpr double kSpectrumTol = 1e-10;
constexpr double kBlowupWindow = 0.05;
constexpr double kOrderLo = 0.8, kOrderHi = 1.2;
constexpr double kOsgoodRelTol = 0.02;
constexpr double kSigmas = 3.0;
constexpr double kComparisonTol = 1e-9;
constexpr double kExplosiveFreq = 0.95;
constexpr double kQuietFreq = 0.05;
constexpr double kSlopeLo = 1.0, kSlopeHi = 2.5;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) { return io::format_double(x); }

std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Mean and standard error.
std::pair<double, double> mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double m = 0.0;
  for (double x : xs) m += x;
  m /= n;
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= (n - 1.0);
  return {m, std::sqrt(v / n)};
}

Result kernel_mass() {
  double worst_mass = 0.0;
  for (double t : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    constexpr int n = 8192;
    const double dx = 2.0 * kPi / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += spde::heat_kernel(t, -kPi + i * dx);
    worst_mass = std::max(worst_mass, std::abs(s * dx - 1.0));
  }
  const double t = spde::kImageSumSwitch;
  const int K = spde::kernel_truncation(t);
  double worst_gap = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -kPi + 2.0 * kPi * i / 400.0;
    worst_gap = std::max(worst_gap, std::abs(spde::heat_kernel_series(t, x, K) - spde::heat_kernel_images(t, x)));
  }
  return {worst_mass <= kMassTol && worst_gap <= kSeriesImageTol,
          "max |mass-1| = " + fixed(worst_mass) + ", series/images gap at t=1e-3 = " + fixed(worst_gap)};
}

Result semigroup_spectrum() {
  constexpr int nx = 64;
  const spde::Grid1D g(nx);
  double worst = 0.0;
  for (double s : {0.01, 0.1, 0.5}) {
    for (int k = 0; k <= 8; ++k) {
      for (int phase = 0; phase < 2; ++phase) {
        std::vector<double> v(nx);
        for (int i = 0; i < nx; ++i) v[i] = phase ? std::sin(k * g.x(i)) : std::cos(k * g.x(i));
        const auto out = spde::semigroup_apply(spde::FieldState(0.0, v, g), s);
        const double factor = std::exp(-double(k * k) * s);
        for (int i = 0; i < nx; ++i) worst = std::max(worst, std::abs(out.values()[i] - factor * v[i]));
      }
    }
  }
  return {worst <= kSpectrumTol, "max mode error = " + fixed(worst)};
}

Result deterministic_blowup() {
  const double exact = 1.0 - 1e-6;  // u = 1/(1-t) reaches 1e6
  std::vector<double> dts{1e-3, 1e-4, 1e-5}, errs;
  double t_fine = 0.0;
  for (double dt : dts) {
    spde::PathRequest r;
    r.config.dt = dt;
    r.config.nx = 16;
    r.config.horizon = 1.5;
    r.config.u_cap = 1e6;
    r.b = Model::power(1.0, 2.0, Symmetry::even);
    r.sigma = Model::constant(0.0);
    r.record.row_stride = 1000;
    const auto tr = spde::simulate_path(spde::FieldState::constant(r.config.grid(), 1.0), r);
    const auto c = diagnostics::classify_explosion(tr, 1e6, 1.5, false).classification;
    if (c.outcome != diagnostics::Outcome::exploded) return {false, "no explosion at dt=" + fmt(dt)};
    errs.push_back(std::abs(c.time - exact));
    t_fine = c.time;
  }
  // least-squares slope of log err against log dt
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = static_cast<double>(dts.size());
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const bool pass = std::abs(t_fine - 1.0) <= kBlowupWindow && order >= kOrderLo && order <= kOrderHi;
  return {pass, "t*(dt=1e-5) = " + fixed(t_fine, 7) + ", errors " + fixed(errs[0]) + " " + fixed(errs[1]) + " " +
                    fixed(errs[2]) + ", observed order " + fixed(order, 3)};
}

Result osgood_oracle() {
  spde::PathRequest r;
  r.config.dt = 1e-4;
  r.config.nx = 16;
  r.config.horizon = 2.0;
  r.config.u_cap = 1e6;
  r.b = Model::log_iterated(1.0, 1, 0.0, Symmetry::odd);
  r.sigma = Model::constant(0.0);
  r.record.row_stride = 100;
  const auto tr = spde::simulate_path(spde::FieldState::constant(r.config.grid(), std::numbers::e), r);
  const auto c = diagnostics::classify_explosion(tr, 1e6, 2.0, false).classification;
  double worst = 0.0;
  for (const auto& row : tr.rows) {
    if (row.t > 1.0 + 1e-12) break;
    worst = std::max(worst, std::abs(row.linf / std::exp(std::exp(row.t)) - 1.0));
  }
  const bool pass = c.outcome == diagnostics::Outcome::survived && worst <= kOsgoodRelTol;
  return {pass, "outcome " + diagnostics::to_string(c.outcome) + " at T=2 (Linf " + fixed(tr.rows.back().linf) +
                    "), max rel. deviation from exp(e^t) on [0,1] = " + fixed(worst)};
}

Result additive_variance() {
  constexpr int R = 200, nx = 256;
  const std::vector<double> times{0.1, 0.5};
  spde::PathRequest r;
  r.config.dt = 1e-4;
  r.config.nx = nx;
  r.config.horizon = times.back();
  r.b = Model();
  r.sigma = Model::constant(1.0);
  r.seed = 505;
  r.record.row_stride = 1000;
  std::vector<std::vector<double>> samples(times.size());
  for (int p = 0; p < R; ++p) {
    r.path_id = static_cast<std::uint32_t>(p);
    std::size_t next = 0;
    spde::simulate_path(spde::FieldState::constant(r.config.grid(), 0.0), r,
                        [&](const spde::FieldState&, const spde::FieldState& after, const spde::StepTerms&) {
                          if (next < times.size() && std::abs(after.t() - times[next]) < 1e-9) {
                            double s = 0.0;
                            for (double x : after.values()) s += x * x;
                            samples[next++].push_back(s / nx);
                          }
                        });
  }
  bool pass = true;
  std::string detail;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    double exact = t / (2.0 * kPi);
    for (int k = 1; k <= 200000; ++k) exact += (1.0 - std::exp(-2.0 * k * k * t)) / (2.0 * k * k) / kPi;
    const auto [m, se] = mean_se(samples[j]);
    const double z = (m - exact) / se;
    pass = pass && std::abs(z) <= kSigmas;
    detail += "t=" + fmt(t) + ": pooled " + fixed(m, 5) + " vs " + fixed(exact, 5) + " (z=" + fixed(z, 3) + ") ";
  }
  return {pass, detail};
}

Result lemma_suites() {
  bool pass = true;
  std::string detail;
  for (const auto& s : diagnostics::run_lemma_suites()) {
    pass = pass && s.pass();
    detail += s.name + " " + std::to_string(s.failures) + "/" + std::to_string(s.cases) + " fail (worst " +
              fixed(s.worst, 3) + "); ";
  }
  return {pass, detail};
}

Result l1_martingale() {
  constexpr int R = 400;
  spde::PathRequest r;
  r.config.dt = 1e-4;
  r.config.nx = 128;
  r.config.horizon = 0.5;
  r.b = Model();
  r.sigma = models::cutoff(Model::power(1.0, 1.0), 10.0);
  r.seed = 707;
  r.record.row_stride = 5000;
  std::vector<double> finals;
  int negative = 0;
  for (int p = 0; p < R; ++p) {
    r.path_id = static_cast<std::uint32_t>(p);
    const auto tr = spde::simulate_path(spde::FieldState::constant(r.config.grid(), 1.0), r);
    finals.push_back(tr.rows.back().integral);
    for (const auto& row : tr.rows) negative += row.min < 0.0;
  }
  const auto [m, se] = mean_se(finals);
  const double z = (m - 2.0 * kPi) / se;
  return {std::abs(z) <= kSigmas, "mean I(0.5) = " + fixed(m, 6) + " vs 2pi, se " + fixed(se, 3) +
                                      ", z = " + fixed(z, 3) + ", rows with negative min " + std::to_string(negative)};
}

// Positivity-forced v path with the log-ledger built online; returns sup I.
struct LedgerRun {
  double sup_I = 0.0;
  diagnostics::BoundCheck bound;
};

LedgerRun ledger_path(const Model& b, const Model& sigma, double C, std::uint32_t path, double T) {
  spde::PathRequest r;
  r.config.dt = 1e-4;
  r.config.nx = 128;
  r.config.horizon = T;
  r.b = b;
  r.sigma = sigma;
  r.extra = spde::ExtraDrift::positivity;
  r.seed = 808;
  r.path_id = path;
  r.stopping.eps = 1e-3;
  r.stopping.halt_on_min = true;
  r.record.row_stride = 1;
  diagnostics::LedgerAccumulator acc;
  const auto tr = spde::simulate_path(
      spde::FieldState::constant(r.config.grid(), 1.0), r,
      [&](const spde::FieldState& a, const spde::FieldState& b2, const spde::StepTerms& t) { acc.observe(a, b2, t); });
  LedgerRun out;
  for (const auto& row : tr.rows) out.sup_I = std::max(out.sup_I, row.integral);
  out.bound = diagnostics::drift_bound_check_a(acc.ledger(), C);
  return out;
}

Result doob_audit() {
  constexpr int R = 200;
  constexpr double T = 0.5, eps = 1e-3, theta = 0.1;
  const Model b = Model::power(1.0, 1.5, Symmetry::even);
  const Model sigma = Model::power(1.0, 1.4, Symmetry::even);
  const std::optional<Model> h = Model::power(1.0 / (8.0 * kPi), 1.8, Symmetry::none, Domain::half_line);
  const auto report = models::check_assumption_a(b, sigma, h, theta, 1.0);
  if (report.verdict != models::Verdict::satisfied) return {false, "case (a) triple not certified"};
  std::vector<double> sups;
  int bound_pass = 0;
  for (int p = 0; p < R; ++p) {
    const auto run = ledger_path(b, sigma, report.drift_constant, static_cast<std::uint32_t>(p), T);
    sups.push_back(run.sup_I);
    bound_pass += run.bound.pass;
  }
  diagnostics::DoobInputs in;
  in.initial_l1 = 2.0 * kPi;
  in.C = report.drift_constant;
  in.eps = eps;
  in.alpha = 4.0;
  in.horizon = T;
  const std::vector<double> Ms{10.0, 100.0, 1000.0};
  const auto rows = diagnostics::doob_bound_check(sups, Ms, in);
  bool pass = true;
  std::string detail = "C = " + fixed(report.drift_constant) + "; ";
  for (const auto& row : rows) {
    pass = pass && row.pass;
    detail += "M=" + fmt(row.M) + ": freq " + fixed(row.frequency, 3) + " bound " + fixed(row.bound, 3) +
              (row.vacuous ? " (vacuous)" : "") + "; ";
  }
  detail += "drift bound held on " + std::to_string(bound_pass) + "/" + std::to_string(R) + " paths; ";

  // negative control: b = u^2, sigma = u, h = u^2 with the same theta
  const Model b2 = Model::power(1.0, 2.0, Symmetry::even);
  const Model s2 = Model::power(1.0, 1.0, Symmetry::even);
  const double C2 = 2.0 * kPi * theta;
  int control_failures = 0;
  double worst_excess = 0.0;
  for (int p = 0; p < 20; ++p) {
    const auto run = ledger_path(b2, s2, C2, static_cast<std::uint32_t>(p), 0.2);
    control_failures += !run.bound.pass;
    worst_excess = std::max(worst_excess, run.bound.max_excess);
  }
  pass = pass && control_failures >= 1;
  detail += "negative control failed on " + std::to_string(control_failures) + "/20 paths (max excess " +
            fixed(worst_excess, 3) + ")";
  return {pass, detail};
}

Result comparison() {
  constexpr int R = 200;
  spde::SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.nx = 128;
  cfg.horizon = 0.5;
  const Model b = Model::power(1.0, 1.5, Symmetry::even);
  const Model sigma = Model::power(1.0, 1.4, Symmetry::even);
  spde::CoupledOptions opts;
  opts.eps = 1e-3;
  opts.linf_level = 10.0;
  opts.comparison_tol = kComparisonTol;
  std::uint64_t checks = 0, violations = 0;
  double worst = 0.0;
  std::map<std::string, int> reasons;
  for (int p = 0; p < R; ++p) {
    const auto res = spde::simulate_coupled(spde::FieldState::constant(cfg.grid(), 1.0), cfg, b, sigma, 909,
                                            static_cast<std::uint32_t>(p), opts);
    checks += res.comparison_checks;
    violations += res.comparison_violations;
    worst = std::max(worst, res.max_violation);
    ++reasons[res.first_stop_reason];
  }
  std::string detail = std::to_string(violations) + " violations in " + std::to_string(checks) +
                       " cell checks (max " + fixed(worst) + "); first stops:";
  for (const auto& [k, v] : reasons) detail += " " + k + "=" + std::to_string(v);
  return {violations == 0, detail};
}

Result phase_regimes() {
  spde::SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.nx = 128;
  cfg.horizon = 2.0;
  cfg.u_cap = 1e6;
  experiments::CampaignOptions opts;
  opts.replications = 200;
  opts.master_seed = 1010;
  const std::vector<double> gammas{0.0, 0.75, 1.5, 1.8, 2.2};
  const auto scan = experiments::phase_diagram({2.0}, gammas, 1.0, cfg, opts);
  // small-amplitude runs: the boundary point gamma = (beta+1)/2 and the Mueller point
  const auto small = experiments::phase_diagram({2.0}, {1.5, 1.8}, 0.01, cfg, opts);
  auto at = [](const experiments::ExperimentResult& r, double g) {
    for (const auto& p : r.points)
      if (p.gamma == g) return p;
    return experiments::PointResult{};
  };
  const auto g0 = at(scan, 0.0), g15 = at(scan, 1.5), g18 = at(scan, 1.8);
  const auto s15 = at(small, 1.5), s18 = at(small, 1.8);
  const bool disjoint = g0.ci.lo > s15.ci.hi;
  const bool pass = g0.frequency > kExplosiveFreq && s15.frequency < kQuietFreq && disjoint &&
                    g18.frequency > s15.frequency && s18.frequency > s15.frequency;
  auto line = [](const experiments::PointResult& p) {
    return "g=" + fmt(p.gamma) + " A=" + fmt(p.amplitude) + ": " + fixed(p.frequency, 3) + " [" + fixed(p.ci.lo, 3) +
           "," + fixed(p.ci.hi, 3) + "] " + p.regime + "; ";
  };
  std::string detail = "[evidence, not proof] ";
  for (const auto& p : scan.points) detail += line(p);
  for (const auto& p : small.points) detail += line(p);
  detail += "A=1 pair g=1.8 vs g=1.5: " + fixed(g18.frequency, 3) + " vs " + fixed(g15.frequency, 3);
  return {pass, detail};
}

Result moment_probe() {
  diagnostics::MomentProbeConfig cfg;
  cfg.seed = 1111;
  const auto probe = diagnostics::moment_scaling_probe(cfg);
  std::string detail = "slope " + fixed(probe.slope, 4) + ", C_p " + fixed(probe.fitted_constant) + ";";
  for (const auto& pt : probe.points)
    detail += " T=" + fmt(pt.T) + ": " + fixed(pt.moment) + "+-" + fixed(pt.se, 2) + " <= " + fixed(pt.bound) +
              (pt.dominated ? "" : " (NOT dominated)");
  return {probe.all_dominated && probe.slope >= kSlopeLo && probe.slope <= kSlopeHi, detail};
}

Result determinism() {
  spde::SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.nx = 64;
  cfg.horizon = 0.5;
  experiments::CampaignOptions opts;
  opts.replications = 16;
  opts.master_seed = 1212;
  opts.workers = 1;
  const auto a = io::to_csv(experiments::phase_diagram({1.5, 2.0}, {0.0, 1.8}, 1.0, cfg, opts));
  opts.workers = 8;
  const auto b = io::to_csv(experiments::phase_diagram({1.5, 2.0}, {0.0, 1.8}, 1.0, cfg, opts));
  const auto c = io::to_csv(experiments::phase_diagram({1.5, 2.0}, {0.0, 1.8}, 1.0, cfg, opts));
  return {a == b && b == c, std::string("1 vs 8 workers ") + (a == b ? "identical" : "DIFFER") + ", rerun " +
                                (b == c ? "identical" : "DIFFERS") + " (" + std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"kernel mass", kernel_mass},
      {"semigroup spectrum", semigroup_spectrum},
      {"deterministic blow-up oracle", deterministic_blowup},
      {"Osgood oracle", osgood_oracle},
      {"additive-noise variance", additive_variance},
      {"lemma suites", lemma_suites},
      {"L1 martingale", l1_martingale},
      {"Doob-bound audit", doob_audit},
      {"comparison principle", comparison},
      {"phase-diagram regime evidence", phase_regimes},
      {"moment-bound probe", moment_probe},
      {"determinism", determinism},
  };
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);
  int failures = 0;
  for (int i : which) {
    const auto& [name, fn] = criteria.at(static_cast<std::size_t>(i - 1));
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d %-30s %s  %s\n", i, name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
    failures += !r.pass;
  }
  return failures == 0 ? 0 : 1;
}
