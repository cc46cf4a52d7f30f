#include "shelab/spde/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shelab/errors.hpp"

namespace shelab::spde {

namespace {
constexpr double kPi = std::numbers::pi;
}

int kernel_truncation(double t) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  // exp(-K^2 t) < 1e-16  <=>  K > sqrt(16 ln 10 / t)
  const double k = std::sqrt(16.0 * std::log(10.0) / t);
  return static_cast<int>(std::floor(k)) + 1;
}

double heat_kernel_series(double t, double x, int K) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  double s = 0.0;
  for (int k = K; k >= 1; --k) s += std::exp(-static_cast<double>(k) * k * t) * std::cos(k * x);
  return 1.0 / (2.0 * kPi) + s / kPi;
}

double heat_kernel_images(double t, double x, int images) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  const double norm = 1.0 / std::sqrt(4.0 * kPi * t);
  double s = 0.0;
  for (int j = -images; j <= images; ++j) {
    const double d = x - 2.0 * kPi * j;
    s += std::exp(-d * d / (4.0 * t));
  }
  return norm * s;
}

double heat_kernel(double t, double x, std::optional<int> truncation) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  if (truncation) return heat_kernel_series(t, x, *truncation);
  if (t < kImageSumSwitch) return heat_kernel_images(t, x);
  return heat_kernel_series(t, x, kernel_truncation(t));
}

double kernel_sup_constant() {
  static const double value = [] {
    double best = 0.0;
    const int n = 400;
    const double a = std::log(1e-6), b = std::log(1.0);
    for (int i = 0; i < n; ++i) {
      const double t = std::exp(a + (b - a) * i / (n - 1));
      best = std::max(best, std::sqrt(t) * heat_kernel(t, 0.0));
    }
    return best;
  }();
  return value;
}

}  // namespace shelab::spde
