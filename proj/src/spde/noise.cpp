#include "shelab/spde/noise.hpp"

#include <cmath>
#include <numbers>

#include "shelab/errors.hpp"

namespace shelab::spde {

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += W0;
    k[1] += W1;
  }
  return c;
}

namespace {

// 53-bit uniform in (0, 1]
double unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t w = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(w >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

void standard_normals(std::uint64_t seed, std::uint32_t path, std::uint64_t step, std::uint32_t tag,
                      std::span<double> out) {
  if (step >> 32) throw RangeError("noise step index exceeds 32 bits");
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const std::size_t n = out.size();
  for (std::size_t pair = 0; 2 * pair < n; ++pair) {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(step), path, tag};
    const auto r = philox4x32_10(ctr, key);
    const double u1 = unit(r[0], r[1]);
    const double u2 = unit(r[2], r[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    out[2 * pair] = rad * std::cos(ang);
    if (2 * pair + 1 < n) out[2 * pair + 1] = rad * std::sin(ang);
  }
}

void refined_normals(std::uint64_t seed, std::uint32_t path, std::uint64_t step, int level, std::span<double> out) {
  if (level < 0 || level > 20) throw ParameterError("refinement level must lie in [0, 20]");
  if (level == 0) {
    standard_normals(seed, path, step, 0u, out);
    return;
  }
  refined_normals(seed, path, step / 2, level - 1, out);
  std::vector<double> fresh(out.size());
  standard_normals(seed, path, step / 2, static_cast<std::uint32_t>(level), fresh);
  const double sign = (step % 2 == 0) ? 1.0 : -1.0;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] + sign * fresh[i]) * std::numbers::sqrt2 / 2.0;
}

NoiseIncrement sample_noise(const Grid1D& grid, double dt, std::uint32_t path_id, std::uint64_t step_index,
                            std::uint64_t master_seed, int refine_level) {
  if (!(dt > 0.0)) throw DomainError("sample_noise needs dt > 0");
  NoiseIncrement inc;
  inc.provenance = {master_seed, path_id, step_index, refine_level};
  inc.cells.resize(static_cast<std::size_t>(grid.nx));
  refined_normals(master_seed, path_id, step_index, refine_level, inc.cells);
  inc.scale = std::sqrt(dt / grid.dx);
  return inc;
}

NoiseStream::NoiseStream(const Grid1D& grid, double dt, std::uint64_t seed, std::uint32_t path, int refine_level)
    : seed_(seed), path_(path), level_(refine_level) {
  if (!(dt > 0.0)) throw DomainError("noise stream needs dt > 0");
  inc_.cells.resize(static_cast<std::size_t>(grid.nx));
  inc_.scale = std::sqrt(dt / grid.dx);
  inc_.provenance = {seed, path, 0, refine_level};
}

const NoiseIncrement& NoiseStream::next() {
  inc_.provenance.step_index = step_;
  refined_normals(seed_, path_, step_, level_, inc_.cells);
  ++step_;
  return inc_;
}

}  // namespace shelab::spde
