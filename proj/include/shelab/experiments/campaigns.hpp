#pragma once

#include <string>
#include <vector>

#include "shelab/experiments/ensemble.hpp"

namespace shelab::experiments {

enum class Regime { bg_explosive, open, thm1_non_explosive, mueller_explosive };
std::string to_string(Regime r);

/// Amplitude at or below which the boundary case 2 gamma = beta + 1 counts
/// as non-explosive.
inline constexpr double kBoundarySmallAmplitude = 0.0795774715459476679;  // 1 / (4 pi)

/// Case split for b = A u^beta, sigma = u^gamma with beta in (1, 2].
Regime annotate_regime(double beta, double gamma, double amplitude,
                       double small_amplitude = kBoundarySmallAmplitude);

struct CampaignOptions {
  int replications = 200;
  std::uint64_t master_seed = 0;
  int workers = 1;
  bool refine = false;
  double u0 = 1.0;
  std::optional<double> budget_seconds;
};

/// b = A |u|^beta, sigma = |u|^gamma over the lattice (beta-major order).
/// Throws ParameterError outside beta in (1, 2], gamma in [0, 2.5].
ExperimentSpec phase_diagram_spec(const std::vector<double>& betas, const std::vector<double>& gammas, double amplitude,
                                  const spde::SolverConfig& solver, const CampaignOptions& opts);
ExperimentResult phase_diagram(const std::vector<double>& betas, const std::vector<double>& gammas, double amplitude,
                               const spde::SolverConfig& solver, const CampaignOptions& opts);

enum class OsgoodDrift { u_log_u, u_log_u_loglog_u };

/// sigma = |u|^gamma for gamma in (1/2, 3/2], plus the two log-corrected
/// noises |u| log(e + |u|)^{1/4} and |u| log(e + |u|)^{1/2} when include_gap.
ExperimentSpec osgood_sweep_spec(OsgoodDrift drift, const std::vector<double>& gammas, bool include_gap,
                                 const spde::SolverConfig& solver, const CampaignOptions& opts);
ExperimentResult osgood_sweep(OsgoodDrift drift, const std::vector<double>& gammas, bool include_gap,
                              const spde::SolverConfig& solver, const CampaignOptions& opts);

}  // namespace shelab::experiments
