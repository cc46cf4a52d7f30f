#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "shelab/spde/grid.hpp"

namespace shelab::spde {

/// Philox4x32 with 10 rounds (counter-based generator).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

struct NoiseProvenance {
  std::uint64_t master_seed = 0;
  std::uint32_t path_id = 0;
  std::uint64_t step_index = 0;
  int refine_level = 0;  // 0: base step dt; L: step dt / 2^L

  bool operator==(const NoiseProvenance&) const = default;
};

/// One time slab of discretized white noise: cells are iid N(0,1) and the
/// increment applied to cell i is scale * cells[i], scale = sqrt(dt/dx).
struct NoiseIncrement {
  NoiseProvenance provenance;
  std::vector<double> cells;
  double scale = 0.0;

  std::uint64_t step_index() const { return provenance.step_index; }
};

/// Raw standard normals for (seed, path, step, cell) at a given stream tag.
/// Pure function of its arguments.
void standard_normals(std::uint64_t seed, std::uint32_t path, std::uint64_t step, std::uint32_t tag,
                      std::span<double> out);

/// Normals at refinement level L, built from level L-1 by the Brownian
/// bridge rule so that pairs of fine increments sum to the coarse one.
void refined_normals(std::uint64_t seed, std::uint32_t path, std::uint64_t step, int level,
                     std::span<double> out);

NoiseIncrement sample_noise(const Grid1D& grid, double dt, std::uint32_t path_id, std::uint64_t step_index,
                            std::uint64_t master_seed, int refine_level = 0);

/// Reusable generator for one path; fills an increment in place.
class NoiseStream {
 public:
  NoiseStream(const Grid1D& grid, double dt, std::uint64_t seed, std::uint32_t path, int refine_level = 0);
  const NoiseIncrement& next();
  const NoiseIncrement& current() const { return inc_; }

 private:
  std::uint64_t seed_;
  std::uint32_t path_;
  int level_;
  std::uint64_t step_ = 0;
  NoiseIncrement inc_;
};

}  // namespace shelab::spde
