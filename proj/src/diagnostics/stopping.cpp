#include "shelab/diagnostics/stopping.hpp"

#include <cmath>

#include "shelab/errors.hpp"

namespace shelab::diagnostics {

std::string to_string(Direction d) { return d == Direction::triple ? "triple" : "third"; }

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::survived: return "survived";
    case Outcome::exploded: return "exploded";
    case Outcome::min_hit: return "min-hit";
    case Outcome::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace detail {

std::optional<double> crossing_time(double t0, double y0, double t1, double y1, double level, bool upward) {
  if (upward) {
    if (y0 >= level) return t0;
    if (y1 < level) return std::nullopt;
  } else {
    if (y0 <= level) return t0;
    if (y1 > level) return std::nullopt;
  }
  if (y1 == y0) return t1;
  const double f = (level - y0) / (y1 - y0);
  return t0 + f * (t1 - t0);
}

std::optional<Direction> earlier_crossing(std::optional<double> t_up, std::optional<double> t_down) {
  if (!t_up && !t_down) return std::nullopt;
  if (!t_up) return Direction::third;
  if (!t_down) return Direction::triple;
  return *t_up < *t_down ? Direction::triple : Direction::third;
}

}  // namespace detail

namespace {

double pow3(int m) { return std::pow(3.0, m); }

std::optional<int> exact_level(double y) {
  if (!(y >= 1.0)) return std::nullopt;
  const int m = static_cast<int>(std::lround(std::log(y) / std::log(3.0)));
  if (m >= 0 && std::abs(pow3(m) - y) <= 1e-12 * y) return m;
  return std::nullopt;
}

}  // namespace

void TriplingTracker::observe(double t, double y) {
  if (!have_prev_) {
    have_prev_ = true;
    t_prev_ = t;
    y_prev_ = y;
    if (auto m = exact_level(y)) {
      level_ = *m;
      entry_t_ = t;
    }
    return;
  }
  walk(t_prev_, y_prev_, t, y);
  t_prev_ = t;
  y_prev_ = y;
}

void TriplingTracker::walk(double t0, double y0, double t1, double y1) {
  using detail::crossing_time;
  for (int guard = 0; guard < 4096; ++guard) {
    if (!level_) {
      // entry: first power of three (m >= 0) reached
      std::optional<double> tu, td;
      int mu = 0, md = 0;
      if (y0 < 1.0) {
        mu = 0;
        if (y1 >= 1.0) tu = crossing_time(t0, y0, t1, y1, 1.0, true);
      } else {
        const int k = static_cast<int>(std::floor(std::log(y0) / std::log(3.0)));
        mu = k + 1;
        md = k;
        if (y1 >= pow3(mu)) tu = crossing_time(t0, y0, t1, y1, pow3(mu), true);
        if (y1 <= pow3(md)) td = crossing_time(t0, y0, t1, y1, pow3(md), false);
      }
      auto dir = detail::earlier_crossing(tu, td);
      if (!dir) return;
      const int m = *dir == Direction::triple ? mu : md;
      const double tc = *dir == Direction::triple ? *tu : *td;
      level_ = m;
      entry_t_ = tc;
      t0 = tc;
      y0 = pow3(m);
      continue;
    }
    const int m = *level_;
    const double up = pow3(m + 1);
    std::optional<double> tu, td;
    if (y1 >= up) tu = crossing_time(t0, y0, t1, y1, up, true);
    if (m >= 1 && y1 <= pow3(m - 1)) td = crossing_time(t0, y0, t1, y1, pow3(m - 1), false);
    auto dir = detail::earlier_crossing(tu, td);
    if (!dir) return;
    const double tc = *dir == Direction::triple ? *tu : *td;
    const int next = *dir == Direction::triple ? m + 1 : m - 1;
    events_.push_back(RhoEvent{tc, next, *dir});
    level_ = next;
    t0 = tc;
    y0 = pow3(next);
  }
}

void mark_overflow(StoppingRecord& rec, double t) {
  if (rec.halted) return;
  rec.classification = Classification{Outcome::exploded, t, true};
  rec.halted = true;
}

void update_stopping(StoppingRecord& rec, double t, double l1, double linf, double min, const StoppingParams& p) {
  if (rec.halted) return;
  if (!std::isfinite(linf) || !std::isfinite(l1)) {
    mark_overflow(rec, t);
    return;
  }
  using detail::crossing_time;
  std::optional<double> t_cap, t_min;
  if (!rec.has_last) {
    if (min < p.eps) rec.tau_inf_eps = t;
    if (l1 >= p.M) rec.tau_l1_M = t;
    for (double n : p.linf_levels)
      if (linf > n) rec.tau_infty_hits.emplace(n, t);
    if (linf >= p.u_cap) t_cap = t;
  } else {
    const double t0 = rec.last_t;
    if (!rec.tau_inf_eps && min < p.eps) rec.tau_inf_eps = crossing_time(t0, rec.last_min, t, min, p.eps, false);
    if (!rec.tau_l1_M && l1 >= p.M) rec.tau_l1_M = crossing_time(t0, rec.last_l1, t, l1, p.M, true);
    for (double n : p.linf_levels)
      if (!rec.tau_infty_hits.count(n) && linf > n)
        rec.tau_infty_hits.emplace(n, *crossing_time(t0, rec.last_linf, t, linf, n, true));
    if (linf >= p.u_cap) t_cap = crossing_time(t0, rec.last_linf, t, linf, p.u_cap, true);
  }
  if (p.halt_on_min && rec.tau_inf_eps && *rec.tau_inf_eps <= t) t_min = rec.tau_inf_eps;
  if (linf > 0.0) {
    rec.tracker.observe(t, linf);
    rec.rho_sequence = rec.tracker.events();
  }
  if (t_cap && (!t_min || *t_cap <= *t_min)) {
    rec.classification = Classification{Outcome::exploded, *t_cap, false};
    rec.halted = true;
  } else if (t_min) {
    rec.classification = Classification{Outcome::min_hit, *t_min, false};
    rec.halted = true;
  }
  rec.has_last = true;
  rec.last_t = t;
  rec.last_l1 = l1;
  rec.last_linf = linf;
  rec.last_min = min;
}

StoppingRecord updated(StoppingRecord rec, double t, double l1, double linf, double min, const StoppingParams& p) {
  update_stopping(rec, t, l1, linf, min, p);
  return rec;
}

void finish_stopping(StoppingRecord& rec, double horizon) {
  if (rec.halted) return;
  rec.classification = Classification{Outcome::survived, horizon, false};
}

std::vector<RhoEvent> tripling_sequence(std::span<const double> times, std::span<const double> linf, int m0) {
  if (times.size() != linf.size()) throw PreconditionError("tripling_sequence: times and values differ in length");
  TriplingTracker tr;
  for (std::size_t i = 0; i < linf.size(); ++i) {
    if (!(linf[i] > 0.0)) throw PreconditionError("tripling_sequence: L-infinity series must be positive");
    if (i > 0 && times[i] < times[i - 1]) throw PreconditionError("tripling_sequence: times must be nondecreasing");
    tr.observe(times[i], linf[i]);
  }
  std::vector<RhoEvent> out;
  for (const auto& e : tr.events()) {
    const int from = e.direction == Direction::triple ? e.level - 1 : e.level + 1;
    if (from >= m0) out.push_back(e);
  }
  return out;
}

}  // namespace shelab::diagnostics
