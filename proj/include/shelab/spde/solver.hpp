#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shelab/models/scalar_model.hpp"
#include "shelab/spde/grid.hpp"
#include "shelab/spde/noise.hpp"
#include "shelab/spde/spectral.hpp"

namespace shelab::spde {

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverConfig {
  Scheme scheme = Scheme::spectral_exponential;
  double dt = 1e-4;
  int nx = 256;
  double horizon = 1.0;
  std::optional<double> cutoff_level;
  double u_cap = 1e6;
  double alpha = 4.0;
  double eps_floor = 1e-6;
  bool taming = false;
  std::optional<int> kernel_truncation;
  // v_- equation: false uses max(v_-, eps)^-alpha, true reproduces the
  // literal text with the v field in the singular drift
  bool literal_vminus_drift = false;

  Grid1D grid() const { return Grid1D(nx); }
  bool operator==(const SolverConfig&) const = default;
};

/// Throws ConfigError naming the offending field.
void validate(const SolverConfig& cfg, bool auxiliary, double initial_linf);

enum class ExtraDrift { none, positivity, negated_reflection };

/// Per-step increments of the integral dx * sum(values), left-point rule.
struct StepTerms {
  double drift = 0.0;       // dt * dx * sum b(v)
  double positivity = 0.0;  // dt * dx * sum max(v, eps)^-alpha
  double variance = 0.0;    // dt * dx * sum sigma(v)^2
  double noise = 0.0;       // dx * sum sigma(v) * scale * z
  int clamp_events = 0;     // cells where v < eps_floor in the singular drift
};

struct StepStatus {
  bool ok = true;
  int bad_cell = -1;  // first non-finite cell
  double time = 0.0;
};

/// Exponential-Euler (or semi-implicit FD) step for one equation. Holds
/// its own FFT buffers, so one instance per path/thread.
class Stepper {
 public:
  Stepper(const SolverConfig& cfg, models::ScalarFunctionModel b, models::ScalarFunctionModel sigma,
          int refine_level = 0);

  double dt() const { return dt_; }
  const SolverConfig& config() const { return cfg_; }

  /// Advances `state` by dt in place. `reference` is the v field, used only
  /// by the literal v_- drift variant.
  StepStatus step(FieldState& state, ExtraDrift extra, const NoiseIncrement& noise, StepTerms* terms = nullptr,
                  std::span<const double> reference = {});

  /// The effective drift and noise coefficient (cutoff applied, taming
  /// applied to the drift) at u.
  double drift_at(double u) const;
  double sigma_at(double u) const;

 private:
  SolverConfig cfg_;
  double dt_;
  models::ScalarFunctionModel b_;
  models::ScalarFunctionModel sigma_;
  FourierMultiplier prop_;
  std::vector<double> pre_;
};

/// One step with a freshly built stepper; convenience form.
FieldState step(const FieldState& state, const SolverConfig& cfg, const models::ScalarFunctionModel& b,
                const models::ScalarFunctionModel& sigma, ExtraDrift extra, const NoiseIncrement& noise,
                StepStatus* status = nullptr);

}  // namespace shelab::spde
