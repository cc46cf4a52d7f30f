#include "shelab/experiments/seeds.hpp"

#include <string>

#include "shelab/errors.hpp"

namespace shelab::experiments {

PathSeed derive_path_seed(std::uint64_t master_seed, std::uint64_t lattice_index, std::uint64_t replication_index) {
  if (lattice_index >= (1ULL << kLatticeBits))
    throw SpecError("lattice index " + std::to_string(lattice_index) + " exceeds the " +
                    std::to_string(kLatticeBits) + "-bit field");
  if (replication_index >= (1ULL << kReplicationBits))
    throw SpecError("replication index " + std::to_string(replication_index) + " exceeds the " +
                    std::to_string(kReplicationBits) + "-bit field");
  return {master_seed, static_cast<std::uint32_t>((lattice_index << kReplicationBits) | replication_index)};
}

}  // namespace shelab::experiments
