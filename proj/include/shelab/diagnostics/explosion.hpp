#pragma once

#include <optional>
#include <string>

#include "shelab/diagnostics/stopping.hpp"
#include "shelab/spde/simulate.hpp"

namespace shelab::diagnostics {

/// Classification from the recorded norm rows alone: exploded(t*) at the
/// first U_cap crossing at or before the horizon, survived otherwise;
/// inconclusive when the trajectory stopped early for another reason or
/// the requested cap exceeds the one used in the run.
Classification classify_from_rows(const spde::Trajectory& tr, double u_cap, double horizon);

struct ExplosionVerdict {
  Classification classification;
  Classification base;
  std::optional<Classification> refined;
  std::string note;
};

/// With refine, the path is rerun at dt/2 using the bridge-refined noise of
/// the same stream; a different outcome gives inconclusive.
ExplosionVerdict classify_explosion(const spde::Trajectory& tr, double u_cap, double horizon, bool refine,
                                    const models::ScalarFunctionModel& b, const models::ScalarFunctionModel& sigma);

/// Models rebuilt from the trajectory header specs.
ExplosionVerdict classify_explosion(const spde::Trajectory& tr, double u_cap, double horizon, bool refine);

}  // namespace shelab::diagnostics
