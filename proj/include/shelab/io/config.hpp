#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shelab/models/scalar_model.hpp"
#include "shelab/spde/solver.hpp"

namespace shelab::io {

struct ExperimentSection {
  std::string kind = "phase-diagram";  // "phase-diagram" or "osgood-sweep"
  std::uint64_t seed = 0;
  int replications = 1;
  int workers = 1;
  double u0 = 1.0;
  bool refine = false;
  std::vector<double> betas;
  std::vector<double> gammas;
  double amplitude = 1.0;
  std::string drift = "u-log-u";  // osgood sweep
  bool include_gap = false;
  std::optional<double> budget_seconds;

  bool operator==(const ExperimentSection&) const = default;
};

/// Inputs for the assumption checkers.
struct CheckSection {
  std::vector<std::string> cases{"a"};  // any of "a", "b", "corollary"
  double theta = 1.0;
  double C = 1.0;
  double c = 0.1;
  double gamma = 0.75;

  bool operator==(const CheckSection&) const = default;
};

struct RunConfig {
  std::optional<models::ModelSpec> b;
  std::optional<models::ModelSpec> sigma;
  std::optional<models::ModelSpec> h;
  spde::SolverConfig solver;
  ExperimentSection experiment;
  CheckSection check;
  double u0 = 0.0;  // constant initial field for simulate
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;
};

/// Parses TOML with sections [model.b], [model.sigma], [model.h], [solver],
/// [experiment], [check]. Errors are ConfigError with "source:line: key: ..."
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// TOML text that parses back to an equal RunConfig.
std::string effective_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

}  // namespace shelab::io
