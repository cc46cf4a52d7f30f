#include "shelab/diagnostics/explosion.hpp"

#include <cmath>

#include "shelab/errors.hpp"

namespace shelab::diagnostics {

Classification classify_from_rows(const spde::Trajectory& tr, double u_cap, double horizon) {
  Classification c;
  if (tr.rows.empty()) {
    c.outcome = Outcome::inconclusive;
    return c;
  }
  // the online record saw every step, the rows may be strided
  const auto& online = tr.stopping.classification;
  if (u_cap == tr.header.config.u_cap && online.outcome == Outcome::exploded && online.time <= horizon)
    return online;
  for (std::size_t k = 0; k < tr.rows.size(); ++k) {
    const auto& r = tr.rows[k];
    if (r.t > horizon) break;
    if (!std::isfinite(r.linf)) {
      c.outcome = Outcome::exploded;
      c.time = r.t;
      c.overflow = true;
      return c;
    }
    if (r.linf >= u_cap) {
      c.outcome = Outcome::exploded;
      c.time = r.t;
      if (k > 0) {
        const auto& p = tr.rows[k - 1];
        if (auto t = detail::crossing_time(p.t, p.linf, r.t, r.linf, u_cap, true)) c.time = *t;
      }
      return c;
    }
  }
  const double reached = tr.rows.back().t;
  const double dt_tol = 1e-9 * std::max(1.0, horizon);
  if (reached + dt_tol < horizon || u_cap > tr.header.config.u_cap) {
    c.outcome = Outcome::inconclusive;
    c.time = reached;
    return c;
  }
  c.outcome = Outcome::survived;
  c.time = horizon;
  return c;
}

namespace {

bool same_outcome(const Classification& a, const Classification& b) { return a.outcome == b.outcome; }

}  // namespace

ExplosionVerdict classify_explosion(const spde::Trajectory& tr, double u_cap, double horizon, bool refine,
                                    const models::ScalarFunctionModel& b, const models::ScalarFunctionModel& sigma) {
  ExplosionVerdict out;
  out.base = classify_from_rows(tr, u_cap, horizon);
  out.classification = out.base;
  if (!refine) return out;
  if (tr.header.u0.empty()) throw InsufficientDataError("trajectory header carries no initial field");

  spde::PathRequest req;
  req.config = tr.header.config;
  req.config.horizon = horizon;
  req.config.u_cap = std::max(u_cap, tr.header.config.u_cap);
  req.b = b;
  req.sigma = sigma;
  req.extra = tr.header.extra;
  req.seed = tr.header.master_seed;
  req.path_id = tr.header.path_id;
  req.refine_level = tr.header.refine_level + 1;
  req.role = tr.header.role;
  req.record.row_stride = 1;
  const spde::Grid1D grid = req.config.grid();
  const spde::FieldState u0(0.0, tr.header.u0, grid);
  const spde::Trajectory fine = spde::simulate_path(u0, req);
  out.refined = classify_from_rows(fine, u_cap, horizon);
  if (!same_outcome(out.base, *out.refined)) {
    out.classification.outcome = Outcome::inconclusive;
    out.note = "outcome changed under dt/2: " + to_string(out.base.outcome) + " vs " +
               to_string(out.refined->outcome);
  } else if (out.base.outcome == Outcome::exploded) {
    out.note = "refined blow-up time " + std::to_string(out.refined->time);
  }
  return out;
}

ExplosionVerdict classify_explosion(const spde::Trajectory& tr, double u_cap, double horizon, bool refine) {
  if (refine && (!tr.header.b_spec || !tr.header.sigma_spec))
    throw InsufficientDataError("trajectory header has no model specs to rebuild from");
  if (!refine) return classify_explosion(tr, u_cap, horizon, false, {}, {});
  return classify_explosion(tr, u_cap, horizon, true, models::ScalarFunctionModel(*tr.header.b_spec),
                            models::ScalarFunctionModel(*tr.header.sigma_spec));
}

}  // namespace shelab::diagnostics
