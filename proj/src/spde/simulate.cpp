#include "shelab/spde/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "shelab/errors.hpp"

namespace shelab::spde {

using diagnostics::StoppingParams;

std::string to_string(ExtraDrift e) {
  switch (e) {
    case ExtraDrift::none: return "none";
    case ExtraDrift::positivity: return "positivity";
    case ExtraDrift::negated_reflection: return "negated-reflection";
  }
  return "?";
}

namespace {

NormRow row_of(const FieldState& s, int clamps) {
  return NormRow{s.t(), s.l1(), s.linf(), s.min(), s.integral(), clamps};
}

std::uint64_t step_count(double horizon, double dt) {
  return static_cast<std::uint64_t>(std::llround(horizon / dt));
}

TrajectoryHeader make_header(const std::string& role, const SolverConfig& cfg, std::uint64_t seed, std::uint32_t path,
                             int level, ExtraDrift extra, const models::ScalarFunctionModel& b,
                             const models::ScalarFunctionModel& sigma, const FieldState& u0) {
  TrajectoryHeader h;
  h.role = role;
  h.config = cfg;
  h.master_seed = seed;
  h.path_id = path;
  h.refine_level = level;
  h.extra = extra;
  h.b_spec = b.spec();
  h.sigma_spec = sigma.spec();
  h.u0.assign(u0.values().begin(), u0.values().end());
  return h;
}

// Bookkeeping for one equation inside a stepping loop.
struct Track {
  Trajectory tr;
  StoppingParams params;
  RecordOptions rec;

  void start(const FieldState& s) {
    tr.snapshot_stride = rec.snapshot_stride;
    tr.rows.push_back(row_of(s, 0));
    if (rec.snapshot_stride > 0) tr.snapshots.push_back(s);
    diagnostics::update_stopping(tr.stopping, s.t(), s.l1(), s.linf(), s.min(), params);
  }

  // Returns false once the path has halted.
  bool advance(const FieldState& s, const StepStatus& st, int clamps, std::uint64_t k, bool last) {
    tr.steps = k;
    tr.t_end = s.t();
    tr.clamp_events += clamps;
    if (!st.ok) {
      tr.overflow = Overflow{st.bad_cell, s.t()};
      diagnostics::mark_overflow(tr.stopping, s.t());
      tr.rows.push_back(row_of(s, clamps));
      return false;
    }
    diagnostics::update_stopping(tr.stopping, s.t(), s.l1(), s.linf(), s.min(), params);
    const bool halted = tr.stopping.halted;
    const int stride = std::max(1, rec.row_stride);
    if (k % static_cast<std::uint64_t>(stride) == 0 || halted || last) tr.rows.push_back(row_of(s, clamps));
    if (rec.snapshot_stride > 0 && k % static_cast<std::uint64_t>(rec.snapshot_stride) == 0) tr.snapshots.push_back(s);
    return !halted;
  }

  void finish(double horizon) { diagnostics::finish_stopping(tr.stopping, horizon); }
};

}  // namespace

Trajectory simulate_path(const FieldState& u0, const PathRequest& req, const StepObserver& observer) {
  const SolverConfig& cfg = req.config;
  validate(cfg, req.extra != ExtraDrift::none, u0.linf());
  if (static_cast<int>(u0.size()) != cfg.nx) throw PreconditionError("initial field does not match nx");
  const Grid1D grid = cfg.grid();
  Stepper stepper(cfg, req.b, req.sigma, req.refine_level);
  NoiseStream noise(grid, stepper.dt(), req.seed, req.path_id, req.refine_level);

  Track t;
  t.params = req.stopping;
  t.params.u_cap = cfg.u_cap;
  t.rec = req.record;
  t.tr.header = make_header(req.role, cfg, req.seed, req.path_id, req.refine_level, req.extra, req.b, req.sigma, u0);

  FieldState s(0.0, std::vector<double>(u0.values().begin(), u0.values().end()), grid.dx);
  t.start(s);
  const std::uint64_t n = step_count(cfg.horizon, stepper.dt());
  FieldState before;
  bool running = !t.tr.stopping.halted;
  for (std::uint64_t k = 1; running && k <= n; ++k) {
    if (observer) before = s;
    StepTerms terms;
    const StepStatus st = stepper.step(s, req.extra, noise.next(), &terms);
    s.set_time(static_cast<double>(k) * stepper.dt());
    running = t.advance(s, st, terms.clamp_events, k, k == n);
    if (observer && st.ok) observer(before, s, terms);
  }
  t.finish(cfg.horizon);
  return std::move(t.tr);
}

CoupledResult simulate_coupled(const FieldState& u0, const SolverConfig& cfg, const models::ScalarFunctionModel& b,
                               const models::ScalarFunctionModel& sigma, std::uint64_t seed, std::uint32_t path_id,
                               const CoupledOptions& opts, int refine_level) {
  const Grid1D grid = cfg.grid();
  if (static_cast<int>(u0.size()) != cfg.nx) throw PreconditionError("initial field does not match nx");
  std::vector<double> v0(u0.size()), w0(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    v0[i] = std::max(u0.values()[i], 1.0);
    w0[i] = std::max(-u0.values()[i], 1.0);
  }
  FieldState su(0.0, std::vector<double>(u0.values().begin(), u0.values().end()), grid.dx);
  FieldState sv(0.0, std::move(v0), grid.dx);
  FieldState sw(0.0, std::move(w0), grid.dx);
  validate(cfg, true, std::max({su.linf(), sv.linf(), sw.linf()}));

  Stepper pu(cfg, b, sigma, refine_level), pv(cfg, b, sigma, refine_level), pw(cfg, b, sigma, refine_level);
  NoiseStream noise(grid, pu.dt(), seed, path_id, refine_level);

  StoppingParams pu_params;
  pu_params.M = opts.M;
  pu_params.u_cap = cfg.u_cap;
  if (opts.linf_level) pu_params.linf_levels.push_back(*opts.linf_level);
  StoppingParams aux = pu_params;
  aux.eps = opts.eps;
  aux.halt_on_min = opts.halt_on_min;

  Track tu{{}, pu_params, opts.record}, tv{{}, aux, opts.record}, tw{{}, aux, opts.record};
  tu.tr.header = make_header("u", cfg, seed, path_id, refine_level, ExtraDrift::none, b, sigma, su);
  tv.tr.header = make_header("v", cfg, seed, path_id, refine_level, ExtraDrift::positivity, b, sigma, sv);
  tw.tr.header = make_header("v-", cfg, seed, path_id, refine_level, ExtraDrift::negated_reflection, b, sigma, sw);
  tu.start(su);
  tv.start(sv);
  tw.start(sw);

  CoupledResult out;
  auto stop_time = [&]() {
    double t = std::numeric_limits<double>::infinity();
    std::string why;
    auto consider = [&](std::optional<double> x, const std::string& r) {
      if (x && *x < t) {
        t = *x;
        why = r;
      }
    };
    for (const Track* tr : {&tu, &tv, &tw}) {
      const auto& rec = tr->tr.stopping;
      const std::string& role = tr->tr.header.role;
      if (rec.halted) consider(rec.classification.time, role + ":" + diagnostics::to_string(rec.classification.outcome));
      consider(rec.tau_l1_M, role + ":L1>=M");
      if (opts.linf_level) {
        if (auto it = rec.tau_infty_hits.find(*opts.linf_level); it != rec.tau_infty_hits.end())
          consider(it->second, role + ":Linf>n");
      }
      if (tr != &tu) consider(rec.tau_inf_eps, role + ":min<eps");
    }
    return std::make_pair(t, why);
  };

  const std::uint64_t n = step_count(cfg.horizon, pu.dt());
  std::vector<double> vref;
  bool running = true;
  for (std::uint64_t k = 1; running && k <= n; ++k) {
    const NoiseIncrement& inc = noise.next();
    const double t = static_cast<double>(k) * pu.dt();
    vref.assign(sv.values().begin(), sv.values().end());
    StepTerms a, c, d;
    const StepStatus stw = pw.step(sw, ExtraDrift::negated_reflection, inc, &d, vref);
    const StepStatus stv = pv.step(sv, ExtraDrift::positivity, inc, &c);
    const StepStatus stu = pu.step(su, ExtraDrift::none, inc, &a);
    su.set_time(t);
    sv.set_time(t);
    sw.set_time(t);
    const bool last = k == n;
    const bool ru = tu.advance(su, stu, a.clamp_events, k, last);
    const bool rv = tv.advance(sv, stv, c.clamp_events, k, last);
    const bool rw = tw.advance(sw, stw, d.clamp_events, k, last);
    running = ru && rv && rw;

    const auto [ts, why] = stop_time();
    if (ts <= t) {
      running = false;
      continue;
    }
    const auto uu = su.values(), vv = sv.values(), ww = sw.values();
    for (std::size_t i = 0; i < uu.size(); ++i) {
      const double viol = std::max(uu[i] - vv[i], -ww[i] - uu[i]);
      ++out.comparison_checks;
      if (viol > opts.comparison_tol) {
        ++out.comparison_violations;
        out.max_violation = std::max(out.max_violation, viol);
      }
    }
  }
  tu.finish(cfg.horizon);
  tv.finish(cfg.horizon);
  tw.finish(cfg.horizon);
  const auto [ts, why] = stop_time();
  out.first_stop = std::min(ts, cfg.horizon);
  out.first_stop_reason = std::isfinite(ts) ? why : "horizon";
  out.u = std::move(tu.tr);
  out.v = std::move(tv.tr);
  out.vminus = std::move(tw.tr);
  return out;
}

}  // namespace shelab::spde
