#pragma once

#include <filesystem>
#include <vector>

#include "shelab/spde/simulate.hpp"

namespace shelab::io {

/// Binary columnar file `<stem>.bin` (little-endian float64 columns t, l1,
/// linf, min, integral, clamp, then optional snapshots) and the JSON
/// sidecar `<stem>.json`. Returns both paths.
std::vector<std::filesystem::path> write_trajectory(const std::filesystem::path& stem, const spde::Trajectory& tr);

/// Reads a dump back. The stopping record keeps classification, crossing
/// times and the rho sequence. Throws Error on malformed input.
spde::Trajectory read_trajectory(const std::filesystem::path& stem);

}  // namespace shelab::io
