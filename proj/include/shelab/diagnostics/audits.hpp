#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shelab/diagnostics/stopping.hpp"
#include "shelab/spde/simulate.hpp"

namespace shelab::diagnostics {

/// Window length after which the heat semigroup maps L1 mass M below
/// 3^{m-2} in sup norm: (C M)^2 3^{-2(m-2)}, C = kernel_sup_constant().
double tripling_window(int m, double M);
/// The window as printed, C^{-2} M^{-2} 3^{-2(m-2)}; kept for comparison.
double tripling_window_literal(int m, double M);

struct WindowCheck {
  int m = 0;
  double window = 0.0;
  double linf_after = 0.0;
  double target = 0.0;
  bool pass = false;
};

/// Puts mass M in one cell, applies the semigroup over the window and
/// compares the sup norm with 3^{m-2}.
WindowCheck tripling_window_check(int m, double M, int nx, bool literal = false);

struct MomentPoint {
  double T = 0.0;
  double moment = 0.0;  // mean of sup_{t<=T, x} |Z|^p
  double se = 0.0;
  double bound = 0.0;   // C_p T^{p/4 - 3/2} * 2 pi T |phi|^p with C_p fitted at the first T
  bool dominated = true;
};

struct MomentProbe {
  double p = 8.0;
  double fitted_constant = 0.0;
  double slope = 0.0;  // least squares slope of log moment vs log T
  std::vector<MomentPoint> points;
  bool all_dominated = true;
};

struct MomentProbeConfig {
  double phi = 1.0;
  std::vector<double> T_grid{0.05, 0.1, 0.2, 0.4};
  double p = 8.0;
  int paths = 300;
  int nx = 128;
  double dt = 1e-4;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// Stochastic convolution Z (b = 0, sigma = phi, u0 = 0) sampled on every
/// step; domination allows 3 standard errors. p <= 6 throws ParameterError.
MomentProbe moment_scaling_probe(const MomentProbeConfig& cfg);

struct TriplingSummary {
  double mean_count_cap = 0.0;      // triplings above 3^m0, run truncated at U_cap
  double mean_count_double = 0.0;   // same paths continued to 2 U_cap
  double paired_se = 0.0;
  double mean_sigma2 = 0.0;         // E int int sigma^2 up to the stop
  double implied_constant = 0.0;    // mean_count_cap / mean_sigma2
  std::size_t paths = 0;
  bool finite = true;
  bool stable = true;
  bool pass = true;
};

struct TriplingPathData {
  std::vector<RhoEvent> events;  // from a run with cap 2 U_cap
  std::optional<double> cap_crossing;  // first time L-inf reached U_cap, if any
  double sigma2_integral = 0.0;
};

/// Counts tripling events starting at level >= m0 with and without the
/// truncation at the U_cap crossing.
TriplingSummary tripling_probability_audit(std::span<const TriplingPathData> paths, int m0);

/// Extracts the audit inputs from a trajectory run with cap 2 U_cap.
TriplingPathData tripling_path_data(const spde::Trajectory& tr, double u_cap, double sigma2_integral);

}  // namespace shelab::diagnostics
