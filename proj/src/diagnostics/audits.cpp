#include "shelab/diagnostics/audits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "shelab/errors.hpp"
#include "shelab/spde/heat_kernel.hpp"
#include "shelab/spde/spectral.hpp"

namespace shelab::diagnostics {

double tripling_window(int m, double M) {
  const double cm = spde::kernel_sup_constant() * M;
  return cm * cm * std::pow(3.0, -2.0 * (m - 2));
}

double tripling_window_literal(int m, double M) {
  const double cm = spde::kernel_sup_constant() * M;
  return std::pow(3.0, -2.0 * (m - 2)) / (cm * cm);
}

WindowCheck tripling_window_check(int m, double M, int nx, bool literal) {
  if (!(M > 0.0)) throw ParameterError("mass M must be positive");
  const spde::Grid1D grid(nx);
  std::vector<double> vals(static_cast<std::size_t>(nx), 0.0);
  vals[static_cast<std::size_t>(nx / 2)] = M / grid.dx;
  WindowCheck out;
  out.m = m;
  out.window = literal ? tripling_window_literal(m, M) : tripling_window(m, M);
  out.target = std::pow(3.0, m - 2);
  const spde::FieldState after = spde::semigroup_apply(spde::FieldState(0.0, std::move(vals), grid), out.window);
  out.linf_after = after.linf();
  out.pass = out.linf_after <= out.target * (1.0 + 1e-9);
  return out;
}

namespace {

// Running sup of |Z| at each grid time for one path.
std::vector<double> convolution_sups(const MomentProbeConfig& cfg, std::uint32_t path,
                                     const std::vector<std::uint64_t>& marks) {
  spde::SolverConfig sc;
  sc.dt = cfg.dt;
  sc.nx = cfg.nx;
  const spde::Grid1D grid = sc.grid();
  spde::Stepper stepper(sc, models::ScalarFunctionModel(), models::ScalarFunctionModel::constant(cfg.phi));
  spde::NoiseStream noise(grid, stepper.dt(), cfg.seed, path);
  spde::FieldState z = spde::FieldState::constant(grid, 0.0);
  std::vector<double> sups;
  sups.reserve(marks.size());
  double sup = 0.0;
  std::size_t next = 0;
  for (std::uint64_t k = 1; next < marks.size(); ++k) {
    stepper.step(z, spde::ExtraDrift::none, noise.next());
    sup = std::max(sup, z.linf());
    while (next < marks.size() && marks[next] == k) {
      sups.push_back(sup);
      ++next;
    }
  }
  return sups;
}

}  // namespace

MomentProbe moment_scaling_probe(const MomentProbeConfig& cfg) {
  if (!(cfg.p > 6.0)) throw ParameterError("moment probe needs p > 6");
  if (cfg.T_grid.empty() || cfg.paths < 2) throw ParameterError("moment probe needs a T grid and at least 2 paths");
  std::vector<double> Ts = cfg.T_grid;
  std::sort(Ts.begin(), Ts.end());
  if (!(Ts.front() > 0.0) || !(Ts.back() < 1.0)) throw ParameterError("T grid must lie in (0, 1)");
  std::vector<std::uint64_t> marks;
  for (double T : Ts) marks.push_back(std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(T / cfg.dt))));

  const auto R = static_cast<std::size_t>(cfg.paths);
  std::vector<std::vector<double>> sups(R);
  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (std::size_t i = cursor++; i < R; i = cursor++) sups[i] = convolution_sups(cfg, static_cast<std::uint32_t>(i), marks);
  };
  const int nw = std::max(1, std::min<int>(cfg.workers, cfg.paths));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(work);
    work();
  }

  MomentProbe out;
  out.p = cfg.p;
  const double exponent = cfg.p / 4.0 - 1.5;
  const double phi_p = std::pow(std::abs(cfg.phi), cfg.p);
  for (std::size_t j = 0; j < Ts.size(); ++j) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
      const double x = std::pow(sups[i][j], cfg.p);
      mean += x;
      sq += x * x;
    }
    mean /= static_cast<double>(R);
    const double var = std::max(0.0, (sq / static_cast<double>(R) - mean * mean)) * static_cast<double>(R) /
                       static_cast<double>(R - 1);
    MomentPoint pt;
    pt.T = Ts[j];
    pt.moment = mean;
    pt.se = std::sqrt(var / static_cast<double>(R));
    out.points.push_back(pt);
  }
  auto shape = [&](double T) { return std::pow(T, exponent) * 2.0 * std::numbers::pi * T * phi_p; };
  out.fitted_constant = shape(Ts.front()) > 0.0 ? out.points.front().moment / shape(Ts.front()) : 0.0;

  bool logs_ok = true;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (auto& pt : out.points) {
    pt.bound = out.fitted_constant * shape(pt.T);
    pt.dominated = pt.moment <= pt.bound + 3.0 * pt.se;
    out.all_dominated = out.all_dominated && pt.dominated;
    if (!(pt.moment > 0.0)) {
      logs_ok = false;
      continue;
    }
    const double x = std::log(pt.T), y = std::log(pt.moment);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(out.points.size());
  if (logs_ok && out.points.size() >= 2) out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

TriplingSummary tripling_probability_audit(std::span<const TriplingPathData> paths, int m0) {
  TriplingSummary s;
  s.paths = paths.size();
  if (paths.empty()) return s;
  double sum_cap = 0.0, sum_all = 0.0, sum_d = 0.0, sum_d2 = 0.0, sum_s2 = 0.0;
  for (const auto& p : paths) {
    double cap = 0.0, all = 0.0;
    for (const auto& e : p.events) {
      if (e.direction != Direction::triple || e.level - 1 < m0) continue;
      all += 1.0;
      if (!p.cap_crossing || e.t <= *p.cap_crossing) cap += 1.0;
    }
    sum_cap += cap;
    sum_all += all;
    sum_d += all - cap;
    sum_d2 += (all - cap) * (all - cap);
    sum_s2 += p.sigma2_integral;
  }
  const double R = static_cast<double>(paths.size());
  s.mean_count_cap = sum_cap / R;
  s.mean_count_double = sum_all / R;
  s.mean_sigma2 = sum_s2 / R;
  s.implied_constant = s.mean_sigma2 > 0.0 ? s.mean_count_cap / s.mean_sigma2 : 0.0;
  const double md = sum_d / R;
  const double var = R > 1 ? std::max(0.0, (sum_d2 - R * md * md) / (R - 1.0)) : 0.0;
  s.paired_se = std::sqrt(var / R);
  s.finite = std::isfinite(s.mean_count_cap) && std::isfinite(s.mean_count_double);
  s.stable = std::abs(s.mean_count_double - s.mean_count_cap) <= 3.0 * s.paired_se + 1e-12;
  s.pass = s.finite && s.stable;
  return s;
}

TriplingPathData tripling_path_data(const spde::Trajectory& tr, double u_cap, double sigma2_integral) {
  TriplingPathData d;
  d.events = tr.stopping.rho_sequence;
  d.sigma2_integral = sigma2_integral;
  for (std::size_t k = 0; k < tr.rows.size(); ++k) {
    const auto& r = tr.rows[k];
    if (!(r.linf < u_cap)) {
      d.cap_crossing = r.t;
      if (k > 0 && std::isfinite(r.linf)) {
        const auto& p = tr.rows[k - 1];
        if (auto t = detail::crossing_time(p.t, p.linf, r.t, r.linf, u_cap, true)) d.cap_crossing = *t;
      }
      break;
    }
  }
  return d;
}

}  // namespace shelab::diagnostics
