#include "shelab/experiments/campaigns.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "shelab/errors.hpp"
#include "shelab/io/serialize.hpp"

namespace shelab::experiments {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::bg_explosive: return "BG-explosive";
    case Regime::open: return "open";
    case Regime::thm1_non_explosive: return "Thm-1 non-explosive";
    case Regime::mueller_explosive: return "Mueller-explosive";
  }
  return "?";
}

Regime annotate_regime(double beta, double gamma, double amplitude, double small_amplitude) {
  if (!(beta > 1.0 && beta <= 2.0)) throw ParameterError("regime split needs beta in (1, 2]");
  if (!(gamma >= 0.0)) throw ParameterError("regime split needs gamma >= 0");
  const double edge = (beta + 1.0) / 2.0;
  if (gamma == 0.0) return Regime::bg_explosive;
  if (gamma > 1.5) return Regime::mueller_explosive;
  if (gamma > edge) return Regime::thm1_non_explosive;
  if (gamma == edge && amplitude <= small_amplitude) return Regime::thm1_non_explosive;
  return Regime::open;
}

namespace {

void check_point(double beta, double gamma) {
  if (!(beta > 1.0 && beta <= 2.0)) throw ParameterError("phase diagram beta must lie in (1, 2]");
  if (!(gamma >= 0.0 && gamma <= 2.5)) throw ParameterError("phase diagram gamma must lie in [0, 2.5]");
}

ExperimentSpec base_spec(const std::string& name, const spde::SolverConfig& solver, const CampaignOptions& opts) {
  ExperimentSpec s;
  s.name = name;
  s.solver = solver;
  s.replications = opts.replications;
  s.master_seed = opts.master_seed;
  s.workers = opts.workers;
  s.refine = opts.refine;
  s.u0 = opts.u0;
  s.budget_seconds = opts.budget_seconds;
  return s;
}

}  // namespace

ExperimentSpec phase_diagram_spec(const std::vector<double>& betas, const std::vector<double>& gammas, double amplitude,
                                  const spde::SolverConfig& solver, const CampaignOptions& opts) {
  using models::ScalarFunctionModel;
  using models::Symmetry;
  ExperimentSpec s = base_spec("phase-diagram", solver, opts);
  for (double beta : betas) {
    for (double gamma : gammas) {
      check_point(beta, gamma);
      ModelPoint pt;
      pt.beta = beta;
      pt.gamma = gamma;
      pt.amplitude = amplitude;
      pt.b = ScalarFunctionModel::power(amplitude, beta, Symmetry::even);
      pt.sigma = ScalarFunctionModel::power(1.0, gamma, Symmetry::even);
      pt.label = to_string(annotate_regime(beta, gamma, amplitude));
      s.points.push_back(std::move(pt));
    }
  }
  return s;
}

ExperimentResult phase_diagram(const std::vector<double>& betas, const std::vector<double>& gammas, double amplitude,
                               const spde::SolverConfig& solver, const CampaignOptions& opts) {
  return run_ensemble(phase_diagram_spec(betas, gammas, amplitude, solver, opts));
}

ExperimentSpec osgood_sweep_spec(OsgoodDrift drift, const std::vector<double>& gammas, bool include_gap,
                                 const spde::SolverConfig& solver, const CampaignOptions& opts) {
  using models::ScalarFunctionModel;
  using models::Symmetry;
  ExperimentSpec s = base_spec("osgood-sweep", solver, opts);
  const int depth = drift == OsgoodDrift::u_log_u ? 1 : 2;
  const ScalarFunctionModel b = ScalarFunctionModel::log_iterated(1.0, depth, 0.0, Symmetry::odd);
  const std::string bname = depth == 1 ? "u log u" : "u log u loglog u";
  auto add = [&](double gamma, ScalarFunctionModel sigma, const std::string& label) {
    ModelPoint pt;
    pt.beta = 1.0;
    pt.gamma = gamma;
    pt.amplitude = 1.0;
    pt.b = b;
    pt.sigma = std::move(sigma);
    pt.label = label;
    s.points.push_back(std::move(pt));
  };
  for (double gamma : gammas) {
    if (!(gamma > 0.5 && gamma <= 1.5)) throw ParameterError("osgood sweep gamma must lie in (1/2, 3/2]");
    add(gamma, ScalarFunctionModel::power(1.0, gamma, Symmetry::even), bname + "; |u|^" + io::format_double(gamma));
  }
  if (include_gap) {
    for (double e : {0.25, 0.5}) {
      add(1.0, ScalarFunctionModel::affine_log_power(1.0, 0.0, 1.0, std::numbers::e, e, Symmetry::even,
                                                     models::Domain::full_line),
          bname + "; |u| log(e+|u|)^" + io::format_double(e) + " (gap)");
    }
  }
  return s;
}

ExperimentResult osgood_sweep(OsgoodDrift drift, const std::vector<double>& gammas, bool include_gap,
                              const spde::SolverConfig& solver, const CampaignOptions& opts) {
  return run_ensemble(osgood_sweep_spec(drift, gammas, include_gap, solver, opts));
}

}  // namespace shelab::experiments
