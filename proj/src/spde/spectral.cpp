#include "shelab/spde/spectral.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "shelab/errors.hpp"

namespace shelab::spde {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Impl(int n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n));
    cplx = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
};

Fft::Fft(int n) : n_(n), impl_(std::make_unique<Impl>(n)) {
  if (n < 2) throw ParameterError("FFT length must be at least 2");
}
Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<const double> values, std::span<std::complex<double>> coeffs) {
  std::memcpy(impl_->real, values.data(), sizeof(double) * static_cast<std::size_t>(n_));
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(coeffs.data()), impl_->cplx, sizeof(fftw_complex) * static_cast<std::size_t>(modes()));
}

void Fft::inverse(std::span<const std::complex<double>> coeffs, std::span<double> values) {
  std::memcpy(impl_->cplx, coeffs.data(), sizeof(fftw_complex) * static_cast<std::size_t>(modes()));
  fftw_execute(impl_->bwd);
  const double inv = 1.0 / n_;
  for (int i = 0; i < n_; ++i) values[static_cast<std::size_t>(i)] = impl_->real[i] * inv;
}

FourierMultiplier::FourierMultiplier(int n, std::vector<double> factors)
    : factors_(std::move(factors)), fft_(n), work_(static_cast<std::size_t>(n / 2 + 1)) {
  if (static_cast<int>(factors_.size()) != n / 2 + 1) throw ParameterError("multiplier needs n/2+1 factors");
}

FourierMultiplier FourierMultiplier::heat(int n, double s) {
  std::vector<double> f(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) f[static_cast<std::size_t>(k)] = std::exp(-static_cast<double>(k) * k * s);
  return FourierMultiplier(n, std::move(f));
}

FourierMultiplier FourierMultiplier::implicit_fd(int n, double dt) {
  const double dx = 2.0 * std::numbers::pi / n;
  std::vector<double> f(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) {
    const double s = std::sin(k * dx / 2.0);
    f[static_cast<std::size_t>(k)] = 1.0 / (1.0 + dt * 4.0 / (dx * dx) * s * s);
  }
  return FourierMultiplier(n, std::move(f));
}

FourierMultiplier FourierMultiplier::for_scheme(Scheme scheme, int n, double dt) {
  return scheme == Scheme::spectral_exponential ? heat(n, dt) : implicit_fd(n, dt);
}

void FourierMultiplier::apply(std::span<double> values) {
  fft_.forward(values, work_);
  for (std::size_t k = 0; k < work_.size(); ++k) work_[k] *= factors_[k];
  fft_.inverse(work_, values);
}

FieldState semigroup_apply(const FieldState& field, double s) {
  if (!(s > 0.0)) throw DomainError("semigroup_apply needs s > 0");
  const int n = static_cast<int>(field.size());
  auto m = FourierMultiplier::heat(n, s);
  std::vector<double> v(field.values().begin(), field.values().end());
  m.apply(v);
  return FieldState(field.t() + s, std::move(v), field.dx());
}

}  // namespace shelab::spde
