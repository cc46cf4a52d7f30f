#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shelab/diagnostics/stopping.hpp"
#include "shelab/models/scalar_model.hpp"
#include "shelab/spde/solver.hpp"

namespace shelab::spde {

std::string to_string(ExtraDrift e);

struct NormRow {
  double t = 0.0;
  double l1 = 0.0;
  double linf = 0.0;
  double min = 0.0;
  double integral = 0.0;
  int clamp_events = 0;
  bool operator==(const NormRow&) const = default;
};

struct TrajectoryHeader {
  std::string role = "u";  // "u", "v" or "v-"
  SolverConfig config;
  std::uint64_t master_seed = 0;
  std::uint32_t path_id = 0;
  int refine_level = 0;
  ExtraDrift extra = ExtraDrift::none;
  std::optional<models::ModelSpec> b_spec;
  std::optional<models::ModelSpec> sigma_spec;
  std::vector<double> u0;
  std::string config_hash;
};

struct Overflow {
  int cell = -1;
  double t = 0.0;
};

struct Trajectory {
  TrajectoryHeader header;
  std::vector<NormRow> rows;
  std::vector<FieldState> snapshots;
  int snapshot_stride = 0;  // 0: none; 1: every step
  std::optional<Overflow> overflow;
  diagnostics::StoppingRecord stopping;
  std::uint64_t steps = 0;
  double t_end = 0.0;
  int clamp_events = 0;

  bool has_every_step_snapshots() const { return snapshot_stride == 1 && !snapshots.empty(); }
};

struct RecordOptions {
  int row_stride = 1;
  int snapshot_stride = 0;
};

/// Called after every step with the states before and after it.
using StepObserver = std::function<void(const FieldState& before, const FieldState& after, const StepTerms& terms)>;

struct PathRequest {
  SolverConfig config;
  models::ScalarFunctionModel b;
  models::ScalarFunctionModel sigma;
  ExtraDrift extra = ExtraDrift::none;
  std::uint64_t seed = 0;
  std::uint32_t path_id = 0;
  int refine_level = 0;
  diagnostics::StoppingParams stopping;
  RecordOptions record;
  std::string role = "u";
};

/// Runs one equation to the horizon, a U_cap crossing, a halting min-hit
/// or the first non-finite value.
Trajectory simulate_path(const FieldState& u0, const PathRequest& req, const StepObserver& observer = {});

struct CoupledOptions {
  double M = std::numeric_limits<double>::infinity();
  double eps = 1e-3;
  // sup-norm level n: crossing it by any of the three paths is a stopping event
  std::optional<double> linf_level;
  bool halt_on_min = true;
  RecordOptions record;
  double comparison_tol = 1e-9;
};

struct CoupledResult {
  Trajectory u, v, vminus;
  double first_stop = 0.0;  // earliest stopping event of the three paths (horizon if none)
  std::string first_stop_reason;
  std::uint64_t comparison_checks = 0;
  std::uint64_t comparison_violations = 0;
  double max_violation = 0.0;
};

/// u, v and v_- driven by one noise stream; v(0) = max(u0, 1) and
/// v_-(0) = max(-u0, 1). Ordering -v_- <= u <= v is checked on every step
/// before the first stopping event.
CoupledResult simulate_coupled(const FieldState& u0, const SolverConfig& cfg, const models::ScalarFunctionModel& b,
                               const models::ScalarFunctionModel& sigma, std::uint64_t seed, std::uint32_t path_id,
                               const CoupledOptions& opts, int refine_level = 0);

}  // namespace shelab::spde
