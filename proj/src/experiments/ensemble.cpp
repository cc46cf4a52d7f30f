#include "shelab/experiments/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "shelab/diagnostics/explosion.hpp"
#include "shelab/errors.hpp"
#include "shelab/experiments/campaigns.hpp"
#include "shelab/experiments/seeds.hpp"
#include "shelab/io/serialize.hpp"
#include "shelab/spde/simulate.hpp"

namespace shelab::experiments {

WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double den = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

// Quantile with linear interpolation on sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

diagnostics::Classification run_one(const ExperimentSpec& spec, std::size_t i, std::size_t r) {
  const ModelPoint& pt = spec.points[i];
  const PathSeed ps = derive_path_seed(spec.master_seed, i, r);
  spde::PathRequest req;
  req.config = spec.solver;
  req.b = pt.b;
  req.sigma = pt.sigma;
  req.seed = ps.seed;
  req.path_id = ps.path_id;
  const auto steps = static_cast<int>(std::llround(spec.solver.horizon / spec.solver.dt));
  req.record.row_stride = std::max(1, steps / 1000);
  const spde::Grid1D grid = spec.solver.grid();
  const auto tr = spde::simulate_path(spde::FieldState::constant(grid, spec.u0), req);
  return diagnostics::classify_explosion(tr, spec.solver.u_cap, spec.solver.horizon, spec.refine, pt.b, pt.sigma)
      .classification;
}

}  // namespace

std::vector<PointResult> summarize(const ExperimentSpec& spec, const std::vector<PathOutcome>& paths) {
  std::vector<PointResult> rows(spec.points.size());
  std::vector<std::vector<double>> times(spec.points.size());
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    const auto& pt = spec.points[i];
    rows[i].beta = pt.beta;
    rows[i].gamma = pt.gamma;
    rows[i].amplitude = pt.amplitude;
    rows[i].label = pt.label;
    rows[i].regime = pt.label;
  }
  for (const auto& p : paths) {
    if (!p.done) continue;
    auto& row = rows[p.point];
    ++row.replications;
    switch (p.classification.outcome) {
      case diagnostics::Outcome::exploded:
        ++row.explosions;
        times[p.point].push_back(p.classification.time);
        break;
      case diagnostics::Outcome::survived: ++row.survivals; break;
      default: ++row.inconclusive; break;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    row.frequency = row.replications ? static_cast<double>(row.explosions) / static_cast<double>(row.replications) : 0.0;
    row.ci = wilson_interval(row.explosions, row.replications);
    auto& t = times[i];
    if (!t.empty()) {
      std::sort(t.begin(), t.end());
      row.q1_t = quantile(t, 0.25);
      row.median_t = quantile(t, 0.5);
      row.q3_t = quantile(t, 0.75);
    }
  }
  return rows;
}

ExperimentResult run_ensemble(const ExperimentSpec& spec) {
  if (spec.replications < 1) throw SpecError("replications must be at least 1");
  if (spec.points.empty()) throw SpecError("campaign has no lattice points");
  spde::validate(spec.solver, false, std::abs(spec.u0));
  derive_path_seed(spec.master_seed, spec.points.size() - 1, static_cast<std::uint64_t>(spec.replications - 1));

  const auto start = std::chrono::steady_clock::now();
  const auto R = static_cast<std::size_t>(spec.replications);
  const std::size_t total = spec.points.size() * R;
  std::vector<PathOutcome> paths(total);
  std::function<bool()> keep_going;
  if (spec.budget_seconds) {
    const double budget = *spec.budget_seconds;
    keep_going = [start, budget] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < budget;
    };
  }
  parallel_for(
      total, spec.workers,
      [&](std::size_t k) {
        PathOutcome& out = paths[k];
        out.point = k / R;
        out.replication = k % R;
        out.classification = run_one(spec, out.point, out.replication);
        out.done = true;
      },
      keep_going);

  ExperimentResult res;
  res.name = spec.name;
  res.incomplete = std::any_of(paths.begin(), paths.end(), [](const PathOutcome& p) { return !p.done; });
  for (std::size_t k = 0; k < total; ++k) {
    paths[k].point = k / R;
    paths[k].replication = k % R;
  }
  res.points = summarize(spec, paths);
  res.paths = std::move(paths);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.config_hash = io::spec_hash(spec);
  res.master_seed = spec.master_seed;
  res.version = SHELAB_VERSION;
  return res;
}

}  // namespace shelab::experiments
