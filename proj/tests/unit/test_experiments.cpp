#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "shelab/errors.hpp"
#include "shelab/experiments/campaigns.hpp"
#include "shelab/experiments/ensemble.hpp"
#include "shelab/experiments/seeds.hpp"
#include "support.hpp"

using namespace shelab;
using namespace shelab::experiments;
using models::ScalarFunctionModel;
using models::Symmetry;

namespace {

spde::SolverConfig small_solver(double horizon) {
  spde::SolverConfig s;
  s.nx = 16;
  s.dt = 1e-3;
  s.horizon = horizon;
  s.u_cap = 1e4;
  return s;
}

ExperimentSpec noisy_spec(int workers) {
  ExperimentSpec spec;
  spec.name = "determinism";
  for (double gamma : {0.5, 1.2}) {
    ModelPoint p;
    p.beta = 2.0;
    p.gamma = gamma;
    p.b = ScalarFunctionModel::power(1.0, 2.0, Symmetry::even);
    p.sigma = ScalarFunctionModel::power(1.0, gamma, Symmetry::even);
    spec.points.push_back(p);
  }
  spec.solver = small_solver(0.6);
  spec.replications = 6;
  spec.master_seed = 31;
  spec.workers = workers;
  return spec;
}

}  // namespace

TEST_CASE("path seeds pack lattice and replication") {
  CHECK(derive_path_seed(5, 0, 0) != derive_path_seed(5, 0, 1));
  CHECK(derive_path_seed(5, 1, 0) != derive_path_seed(5, 0, 1));
  CHECK(derive_path_seed(5, 3, 9) == derive_path_seed(5, 3, 9));
  CHECK(derive_path_seed(5, 3, 9).path_id == ((3u << 20) | 9u));

  std::set<std::uint32_t> ids;
  for (std::uint64_t l = 0; l < 40; ++l)
    for (std::uint64_t r = 0; r < 300; ++r) ids.insert(derive_path_seed(1, l, r).path_id);
  CHECK(ids.size() == 40u * 300u);

  CHECK_NOTHROW(derive_path_seed(1, 4095, (1u << 20) - 1));
  CHECK_THROWS_AS(derive_path_seed(1, 4096, 0), SpecError);
  CHECK_THROWS_AS(derive_path_seed(1, 0, 1u << 20), SpecError);
}

TEST_CASE("wilson interval") {
  const auto none = wilson_interval(0, 10);
  CHECK(none.lo == doctest::Approx(0.0));
  CHECK(none.hi == doctest::Approx(0.27754).epsilon(1e-4));
  const auto half = wilson_interval(5, 10);
  CHECK(half.lo == doctest::Approx(0.23659).epsilon(1e-4));
  CHECK(half.hi == doctest::Approx(0.76341).epsilon(1e-4));

  auto g = test::rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto n = static_cast<std::size_t>(test::uniform(g, 1.0, 500.0));
    const auto k = static_cast<std::size_t>(test::uniform(g, 0.0, static_cast<double>(n) + 0.999));
    const auto ci = wilson_interval(k, n);
    const double p = static_cast<double>(k) / static_cast<double>(n);
    CHECK(ci.lo >= 0.0);
    CHECK(ci.hi <= 1.0);
    CHECK(ci.lo <= p + 1e-12);
    CHECK(ci.hi >= p - 1e-12);
  }
}

TEST_CASE("regime annotation") {
  CHECK(annotate_regime(2.0, 0.0, 1.0) == Regime::bg_explosive);
  CHECK(annotate_regime(1.5, 1.4, 1.0) == Regime::thm1_non_explosive);
  CHECK(annotate_regime(2.0, 1.8, 1.0) == Regime::mueller_explosive);
  CHECK(annotate_regime(2.0, 1.5, 0.01) == Regime::thm1_non_explosive);
  CHECK(annotate_regime(2.0, 1.5, 1.0) == Regime::open);
  CHECK(annotate_regime(2.0, 1.0, 1.0) == Regime::open);
  CHECK(to_string(Regime::bg_explosive) == "BG-explosive");
  CHECK(to_string(Regime::thm1_non_explosive) == "Thm-1 non-explosive");
}

TEST_CASE("single-path ensemble matches the ODE blow-up time") {
  ExperimentSpec spec;
  ModelPoint p;
  p.beta = 2.0;
  p.b = ScalarFunctionModel::power(1.0, 2.0, Symmetry::even);
  spec.points.push_back(p);
  spec.solver.nx = 8;
  spec.solver.dt = 1e-4;
  spec.solver.horizon = 2.0;
  spec.u0 = 1.0;
  const auto r = run_ensemble(spec);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].frequency == 1.0);
  REQUIRE(r.points[0].median_t.has_value());
  CHECK(*r.points[0].median_t == doctest::Approx(1.0).epsilon(0.02));
  CHECK_FALSE(r.incomplete);
}

TEST_CASE("ensembles do not depend on scheduling") {
  const auto a = run_ensemble(noisy_spec(1));
  const auto b = run_ensemble(noisy_spec(8));
  const auto c = run_ensemble(noisy_spec(1));
  REQUIRE(a.paths.size() == b.paths.size());
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(a.paths[i].classification == b.paths[i].classification);
    CHECK(a.paths[i].classification == c.paths[i].classification);
  }
  CHECK(a.config_hash == b.config_hash);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto& pa = a.points[i];
    CHECK(pa.explosions + pa.survivals + pa.inconclusive == pa.replications);
    CHECK(pa.explosions == b.points[i].explosions);
    CHECK(pa.median_t == b.points[i].median_t);
  }
}

TEST_CASE("exhausted budget marks the run incomplete") {
  auto spec = noisy_spec(1);
  spec.budget_seconds = 0.0;
  const auto r = run_ensemble(spec);
  CHECK(r.incomplete);
  for (const auto& p : r.points) CHECK(p.replications < 6);
}

TEST_CASE("invalid ensembles are rejected") {
  auto spec = noisy_spec(1);
  spec.replications = 0;
  CHECK_THROWS_AS(run_ensemble(spec), SpecError);
  spec = noisy_spec(1);
  spec.solver.dt = -1.0;
  CHECK_THROWS_AS(run_ensemble(spec), ConfigError);
}

TEST_CASE("campaign lattices") {
  CampaignOptions opts;
  opts.replications = 2;
  const auto spec = phase_diagram_spec({1.5, 2.0}, {0.0, 1.8}, 1.0, small_solver(0.1), opts);
  REQUIRE(spec.points.size() == 4);
  CHECK(spec.points[0].beta == 1.5);
  CHECK(spec.points[1].gamma == 1.8);
  CHECK(spec.points[3].b.value(-3.0) == doctest::Approx(9.0));
  CHECK(spec.points[3].sigma.value(-4.0) == doctest::Approx(std::pow(4.0, 1.8)));
  CHECK_THROWS_AS(phase_diagram_spec({0.5}, {1.0}, 1.0, small_solver(0.1), opts), ParameterError);
  CHECK_THROWS_AS(phase_diagram_spec({2.0}, {3.0}, 1.0, small_solver(0.1), opts), ParameterError);

  const auto sweep = osgood_sweep_spec(OsgoodDrift::u_log_u, {1.0}, true, small_solver(0.1), opts);
  CHECK(sweep.points.size() == 3);
  CHECK_THROWS_AS(osgood_sweep_spec(OsgoodDrift::u_log_u, {0.4}, false, small_solver(0.1), opts), ParameterError);
}
