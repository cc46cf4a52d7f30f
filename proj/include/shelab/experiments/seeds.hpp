#pragma once

#include <cstdint>

namespace shelab::experiments {

/// Field widths of the packed path id: lattice index in the high 12 bits,
/// replication index in the low 20.
inline constexpr int kLatticeBits = 12;
inline constexpr int kReplicationBits = 20;

struct PathSeed {
  std::uint64_t seed = 0;     // Philox key
  std::uint32_t path_id = 0;  // counter word
  bool operator==(const PathSeed&) const = default;
};

/// Injective by fixed-width packing. Throws SpecError when an index does
/// not fit its field.
PathSeed derive_path_seed(std::uint64_t master_seed, std::uint64_t lattice_index, std::uint64_t replication_index);

}  // namespace shelab::experiments
