#include "shelab/spde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shelab/errors.hpp"

namespace shelab::spde {

std::string to_string(Scheme s) {
  return s == Scheme::spectral_exponential ? "spectral-exponential" : "semi-implicit-fd";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "spectral-exponential") return Scheme::spectral_exponential;
  if (s == "semi-implicit-fd") return Scheme::semi_implicit_fd;
  throw ConfigError("unknown scheme '" + s + "'");
}

void validate(const SolverConfig& cfg, bool auxiliary, double initial_linf) {
  auto fail = [](const std::string& key, const std::string& msg) { throw ConfigError("solver." + key + ": " + msg); };
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("dt", "time step must be positive");
  if (cfg.nx < 8) fail("nx", "grid needs at least 8 cells");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) fail("horizon", "horizon must be positive");
  if (cfg.cutoff_level && !(*cfg.cutoff_level > 0.0)) fail("cutoff", "cutoff level must be positive");
  if (auxiliary && !(cfg.alpha > 3.0)) fail("alpha", "positivity exponent alpha must exceed 3");
  if (!(cfg.eps_floor > 0.0)) fail("eps_floor", "clamp floor must be positive");
  if (!(cfg.u_cap > initial_linf)) {
    std::ostringstream os;
    os << "overflow cap " << cfg.u_cap << " must exceed the initial sup norm " << initial_linf;
    fail("u_cap", os.str());
  }
  if (cfg.horizon / cfg.dt > 4e9) fail("dt", "too many steps for the noise counter");
}

Stepper::Stepper(const SolverConfig& cfg, models::ScalarFunctionModel b, models::ScalarFunctionModel sigma,
                 int refine_level)
    : cfg_(cfg),
      dt_(std::ldexp(cfg.dt, -refine_level)),
      b_(std::move(b)),
      sigma_(std::move(sigma)),
      prop_(FourierMultiplier::for_scheme(cfg.scheme, cfg.nx, std::ldexp(cfg.dt, -refine_level))),
      pre_(static_cast<std::size_t>(cfg.nx)) {}

double Stepper::drift_at(double u) const {
  if (cfg_.cutoff_level) u = std::clamp(u, -*cfg_.cutoff_level, *cfg_.cutoff_level);
  const double b = b_.value(u);
  return cfg_.taming ? b / (1.0 + dt_ * std::abs(b)) : b;
}

double Stepper::sigma_at(double u) const {
  if (cfg_.cutoff_level) u = std::clamp(u, -*cfg_.cutoff_level, *cfg_.cutoff_level);
  return sigma_.value(u);
}

namespace {

double singular(double x, double alpha) {
  if (alpha == 4.0) {
    const double x2 = x * x;
    return 1.0 / (x2 * x2);
  }
  return std::pow(x, -alpha);
}

}  // namespace

StepStatus Stepper::step(FieldState& state, ExtraDrift extra, const NoiseIncrement& noise, StepTerms* terms,
                         std::span<const double> reference) {
  const auto v = state.values();
  const std::size_t n = v.size();
  if (noise.cells.size() != n) throw PreconditionError("noise increment does not match the grid");
  const double dx = state.dx();
  const double scale = noise.scale;
  const bool literal = extra == ExtraDrift::negated_reflection && cfg_.literal_vminus_drift;
  if (literal && reference.size() != n) throw PreconditionError("literal v_- drift needs the v field");
  double sb = 0.0, sa = 0.0, ss = 0.0, sn = 0.0;
  int clamps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = v[i];
    double drift, sig, pos = 0.0;
    if (extra == ExtraDrift::negated_reflection) {
      drift = -drift_at(-u);
      sig = -sigma_at(-u);
    } else {
      drift = drift_at(u);
      sig = sigma_at(u);
    }
    if (extra != ExtraDrift::none) {
      const double base = literal ? reference[i] : u;
      if (base < cfg_.eps_floor) ++clamps;
      pos = singular(std::max(base, cfg_.eps_floor), cfg_.alpha);
    }
    const double kick = sig * scale * noise.cells[i];
    pre_[i] = u + dt_ * (drift + pos) + kick;
    sb += drift;
    sa += pos;
    ss += sig * sig;
    sn += kick;
  }
  prop_.apply(pre_);
  StepStatus st;
  st.time = state.t() + dt_;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(pre_[i])) {
      st.ok = false;
      st.bad_cell = static_cast<int>(i);
      break;
    }
  }
  if (terms) {
    terms->drift = dt_ * dx * sb;
    terms->positivity = dt_ * dx * sa;
    terms->variance = dt_ * dx * ss;
    terms->noise = dx * sn;
    terms->clamp_events = clamps;
  }
  state.assign(st.time, pre_);
  return st;
}

FieldState step(const FieldState& state, const SolverConfig& cfg, const models::ScalarFunctionModel& b,
                const models::ScalarFunctionModel& sigma, ExtraDrift extra, const NoiseIncrement& noise,
                StepStatus* status) {
  Stepper s(cfg, b, sigma, noise.provenance.refine_level);
  FieldState out = state;
  const StepStatus st = s.step(out, extra, noise);
  if (status) *status = st;
  return out;
}

}  // namespace shelab::spde
