#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "shelab/spde/grid.hpp"

namespace shelab::spde {

enum class Scheme { spectral_exponential, semi_implicit_fd };

/// Real-to-complex FFT pair of fixed length with owned aligned buffers.
/// One instance per thread; plan creation is serialized internally.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  int size() const { return n_; }
  int modes() const { return n_ / 2 + 1; }
  /// values -> unnormalized coefficients
  void forward(std::span<const double> values, std::span<std::complex<double>> coeffs);
  /// coefficients -> values, divided by n
  void inverse(std::span<const std::complex<double>> coeffs, std::span<double> values);

 private:
  struct Impl;
  int n_ = 0;
  std::unique_ptr<Impl> impl_;
};

/// Applies a diagonal Fourier multiplier m(k), k = 0..n/2, in place.
class FourierMultiplier {
 public:
  FourierMultiplier(int n, std::vector<double> factors);

  /// exp(-k^2 s): the periodic heat semigroup over time s.
  static FourierMultiplier heat(int n, double s);
  /// 1 / (1 + dt (4/dx^2) sin^2(k dx / 2)): implicit Euler with the
  /// second-difference Laplacian.
  static FourierMultiplier implicit_fd(int n, double dt);
  static FourierMultiplier for_scheme(Scheme scheme, int n, double dt);

  void apply(std::span<double> values);
  std::span<const double> factors() const { return factors_; }

 private:
  std::vector<double> factors_;
  Fft fft_;
  std::vector<std::complex<double>> work_;
};

/// Circular convolution with the periodic heat kernel at time s > 0.
FieldState semigroup_apply(const FieldState& field, double s);

}  // namespace shelab::spde
