#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "shelab/diagnostics/stopping.hpp"
#include "shelab/models/scalar_model.hpp"
#include "shelab/spde/solver.hpp"

namespace shelab::experiments {

/// Runs fn(i) for i in [0, n) on `workers` threads pulling from a shared
/// counter. Results must be written to slot i so the outcome does not
/// depend on scheduling. Returns the number of indices started; stops
/// handing out work once `keep_going` returns false.
template <class Fn>
std::size_t parallel_for(std::size_t n, int workers, Fn&& fn, const std::function<bool()>& keep_going = {}) {
  std::atomic<std::size_t> cursor{0};
  std::atomic<std::size_t> started{0};
  auto work = [&] {
    for (;;) {
      if (keep_going && !keep_going()) return;
      const std::size_t i = cursor++;
      if (i >= n) return;
      ++started;
      fn(i);
    }
  };
  const auto nw = static_cast<std::size_t>(std::max(1, workers));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < std::min(nw, n); ++w) pool.emplace_back(work);
    work();
  }
  return started.load();
}

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for k successes in n trials (z = 1.96).
WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z = 1.96);

/// One concrete model triple of a campaign.
struct ModelPoint {
  double beta = 0.0;
  double gamma = 0.0;
  double amplitude = 1.0;
  models::ScalarFunctionModel b;
  models::ScalarFunctionModel sigma;
  std::optional<models::ScalarFunctionModel> h;
  std::string label;
};

struct ExperimentSpec {
  std::string name = "campaign";
  std::vector<ModelPoint> points;
  spde::SolverConfig solver;
  int replications = 1;
  std::uint64_t master_seed = 0;
  double u0 = 1.0;
  bool refine = false;
  int workers = 1;
  std::optional<double> budget_seconds;
};

struct PathOutcome {
  std::size_t point = 0;
  std::size_t replication = 0;
  diagnostics::Classification classification;
  bool done = false;
};

struct PointResult {
  double beta = 0.0, gamma = 0.0, amplitude = 0.0;
  std::string label;
  std::string regime;
  std::size_t replications = 0;  // completed paths
  std::size_t explosions = 0, survivals = 0, inconclusive = 0;
  double frequency = 0.0;
  WilsonInterval ci;
  std::optional<double> median_t, q1_t, q3_t;  // over exploded paths
};

struct ExperimentResult {
  std::string name;
  std::vector<PointResult> points;
  std::vector<PathOutcome> paths;
  bool incomplete = false;
  double wall_seconds = 0.0;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string version;
  std::string header = "finite-horizon explosion frequencies: statistical evidence, not proof";
};

/// R paths per point, u0 constant, classification by classify_explosion.
/// Path (i, r) uses derive_path_seed(master, i, r). Throws ConfigError for
/// an invalid solver config and SpecError for R < 1 or too many points.
ExperimentResult run_ensemble(const ExperimentSpec& spec);

/// Reduces per-path outcomes into per-point rows (exposed for tests).
std::vector<PointResult> summarize(const ExperimentSpec& spec, const std::vector<PathOutcome>& paths);

}  // namespace shelab::experiments
