#pragma once

#include <optional>

namespace shelab::spde {

/// Below this time the Gaussian image sum is used instead of the cosine series.
inline constexpr double kImageSumSwitch = 1e-3;

/// Smallest K with exp(-K^2 t) < 1e-16.
int kernel_truncation(double t);

/// 1/(2 pi) + (1/pi) sum_{k=1}^{K} exp(-k^2 t) cos(k x).
double heat_kernel_series(double t, double x, int K);

/// sum_{|j| <= images} (4 pi t)^{-1/2} exp(-(x - 2 pi j)^2 / (4 t)).
double heat_kernel_images(double t, double x, int images = 3);

/// Periodic heat kernel on [-pi, pi]. With no explicit truncation the
/// representation is chosen by t. Throws DomainError for t <= 0.
double heat_kernel(double t, double x, std::optional<int> truncation = std::nullopt);

/// sup over a log-spaced t grid in [1e-6, 1] of sqrt(t) * max_x G(t, x).
/// Computed once and cached.
double kernel_sup_constant();

}  // namespace shelab::spde
