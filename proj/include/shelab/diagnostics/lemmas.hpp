#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shelab::diagnostics {

struct LemmaSuiteOptions {
  std::uint64_t seed = 20240917;
  int jensen_fields = 10000;
  int jensen_nx = 64;
  int fg_points = 100;
  int g_transform_points = 200;
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest error (or ratio excess) seen
  std::string worst_case{};
  bool pass() const { return failures == 0; }
};

/// Property suites over the h families u^2, (1+u) log(1+u) and u^1.5:
/// Jensen inequality on random nonnegative fields, the f/g inverse
/// product identity, the convexity ratio and the g-transform round trip.
std::vector<SuiteResult> run_lemma_suites(const LemmaSuiteOptions& opts = {});

}  // namespace shelab::diagnostics
