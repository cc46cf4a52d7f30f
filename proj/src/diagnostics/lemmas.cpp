#include "shelab/diagnostics/lemmas.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "shelab/models/conditions.hpp"

namespace shelab::diagnostics {

namespace {

using models::ScalarFunctionModel;

struct Family {
  std::string name;
  ScalarFunctionModel h;
};

std::vector<Family> families() {
  using models::Domain;
  using models::Symmetry;
  return {{"u^2", ScalarFunctionModel::power(1.0, 2.0, Symmetry::none, Domain::half_line)},
          {"(1+u)log(1+u)", ScalarFunctionModel::affine_log_power(1.0, 1.0, 1.0, 1.0, 1.0)},
          {"u^1.5", ScalarFunctionModel::power(1.0, 1.5, Symmetry::none, Domain::half_line)}};
}

void note(SuiteResult& s, double err, bool failed, const std::string& where) {
  ++s.cases;
  if (failed) ++s.failures;
  if (err > s.worst) {
    s.worst = err;
    s.worst_case = where;
  }
}

// Constants, smoothed indicator bumps or lognormal samples.
std::vector<double> random_field(std::mt19937_64& rng, int nx) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(nx));
  const double scale = std::pow(10.0, 6.0 * unit(rng) - 3.0);
  switch (kind(rng)) {
    case 0:
      std::fill(v.begin(), v.end(), scale);
      break;
    case 1: {
      const double centre = -std::numbers::pi + 2.0 * std::numbers::pi * unit(rng);
      const double width = 0.05 + 1.5 * unit(rng);
      const double sharp = 2.0 + 30.0 * unit(rng);
      const double floor = unit(rng) < 0.5 ? 0.0 : scale * 1e-3 * unit(rng);
      for (int i = 0; i < nx; ++i) {
        const double x = -std::numbers::pi + 2.0 * std::numbers::pi * i / nx;
        double d = std::abs(x - centre);
        d = std::min(d, 2.0 * std::numbers::pi - d);
        v[static_cast<std::size_t>(i)] = floor + scale * 0.5 * (1.0 - std::tanh(sharp * (d - width)));
      }
      break;
    }
    default: {
      std::lognormal_distribution<double> ln(std::log(scale), 0.5 + 2.0 * unit(rng));
      for (auto& x : v) x = ln(rng);
      break;
    }
  }
  return v;
}

}  // namespace

std::vector<SuiteResult> run_lemma_suites(const LemmaSuiteOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto fams = families();
  std::vector<SuiteResult> out;

  SuiteResult jensen{"jensen"};
  for (int k = 0; k < opts.jensen_fields; ++k) {
    const auto v = random_field(rng, opts.jensen_nx);
    for (const auto& f : fams) {
      const auto r = models::jensen_check(f.h, v);
      const double excess = (r.lhs - r.rhs) / std::max(1.0, std::abs(r.rhs));
      note(jensen, std::max(0.0, excess), !r.pass, f.name + " field " + std::to_string(k));
    }
  }
  out.push_back(jensen);

  SuiteResult fg{"fg-product-identity"};
  for (const auto& f : fams) {
    const auto pair = models::fg_pair(f.h);
    const double lo = std::max(pair.h_at_zero, 1e-3);
    for (int k = 0; k < opts.fg_points; ++k) {
      const double w = lo * std::pow(1e6 / lo, unit(rng));
      if (!(w > pair.h_at_zero)) continue;
      const double err = std::abs(pair.f_inverse(w) * pair.g_inverse(w) / w - 1.0);
      note(fg, err, err > models::Tolerances::identity_rel, f.name + " w=" + std::to_string(w));
    }
  }
  out.push_back(fg);

  SuiteResult conv{"convexity-ratio"};
  const auto grid = models::log_grid(1e-2, 1e8, 400);
  for (double beta : {1.25, 1.5, 2.0, 3.0}) {
    const auto h = ScalarFunctionModel::power(1.0, beta, models::Symmetry::none, models::Domain::half_line);
    const auto r = models::convexity_ratio_check(h, grid);
    const double err = std::abs(r.max_ratio - (beta - 1.0) / beta);
    note(conv, err, err > models::Tolerances::identity_rel || !r.pass, "u^" + std::to_string(beta));
  }
  {
    const auto r = models::convexity_ratio_check(fams[1].h, grid);
    note(conv, std::max(0.0, r.max_ratio - 2.0), !r.pass, fams[1].name);
  }
  out.push_back(conv);

  SuiteResult gt{"g-transform-round-trip"};
  const auto ugrid = models::log_grid(1e-3, 1e8, opts.g_transform_points);
  for (const auto& f : fams) {
    const auto g = models::g_transform(f.h);
    const double h0 = f.h.value(0.0);
    for (double u : ugrid) {
      const double hu = f.h.value(u);
      const double err = std::abs(hu - h0 - u * g.value(std::log(u))) / std::max(1.0, hu);
      note(gt, err, err > 1e-10, f.name + " u=" + std::to_string(u));
    }
  }
  out.push_back(gt);
  return out;
}

}  // namespace shelab::diagnostics
