#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "shelab/diagnostics/audits.hpp"
#include "shelab/diagnostics/explosion.hpp"
#include "shelab/diagnostics/ledger.hpp"
#include "shelab/diagnostics/lemmas.hpp"
#include "shelab/diagnostics/stopping.hpp"
#include "shelab/errors.hpp"
#include "shelab/spde/heat_kernel.hpp"
#include "shelab/spde/simulate.hpp"
#include "support.hpp"

using namespace shelab;
using namespace shelab::diagnostics;
using models::ScalarFunctionModel;
using models::Symmetry;

namespace {

spde::PathRequest ode_request(ScalarFunctionModel b, double dt, double horizon, int nx = 8) {
  spde::PathRequest req;
  req.config.nx = nx;
  req.config.dt = dt;
  req.config.horizon = horizon;
  req.b = std::move(b);
  req.stopping.u_cap = req.config.u_cap;
  return req;
}

}  // namespace

TEST_CASE("stopping times from synthetic norms") {
  StoppingParams p;
  p.M = 5.0;
  p.eps = 0.1;
  p.linf_levels = {3.0};
  StoppingRecord rec;
  const std::vector<double> linf{1, 2, 5, 2}, l1{1, 4, 9, 9}, mins{1, 0.5, 0.05, 0.05};
  for (std::size_t i = 0; i < 4; ++i) update_stopping(rec, static_cast<double>(i), l1[i], linf[i], mins[i], p);

  REQUIRE(rec.tau_infty_hits.count(3.0) == 1);
  const double hit = rec.tau_infty_hits.at(3.0);
  CHECK(hit > 1.0);
  CHECK(hit <= 2.0);
  CHECK(hit == doctest::Approx(1.0 + 1.0 / 3.0));

  REQUIRE(rec.tau_l1_M.has_value());
  CHECK(*rec.tau_l1_M == doctest::Approx(1.2));
  REQUIRE(rec.tau_inf_eps.has_value());
  CHECK(*rec.tau_inf_eps == doctest::Approx(1.0 + 0.4 / 0.45));

  // later samples never overwrite a recorded crossing
  update_stopping(rec, 4.0, 100.0, 100.0, 0.0, p);
  CHECK(rec.tau_infty_hits.at(3.0) == doctest::Approx(1.0 + 1.0 / 3.0));
  CHECK(*rec.tau_l1_M == doctest::Approx(1.2));
}

TEST_CASE("tripling sequence examples") {
  const std::vector<double> t{0, 1, 2, 3}, y{1, 3, 9, 3};
  const auto ev = tripling_sequence(t, y);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == RhoEvent{1.0, 1, Direction::triple});
  CHECK(ev[1] == RhoEvent{2.0, 2, Direction::triple});
  CHECK(ev[2] == RhoEvent{3.0, 1, Direction::third});

  const std::vector<double> mono{1.0, 1.5, 2.0, 2.9};
  CHECK(tripling_sequence(t, mono).empty());

  CHECK(tripling_sequence(t, y, 1).size() == 2);
  const std::vector<double> bad{1.0, 0.0, 2.0, 3.0};
  CHECK_THROWS_AS(tripling_sequence(t, bad), PreconditionError);
}

TEST_CASE("crossing tie resolves to a fall") {
  CHECK(detail::earlier_crossing(1.0, 1.0) == Direction::third);
  CHECK(detail::earlier_crossing(0.5, 1.0) == Direction::triple);
  CHECK(detail::earlier_crossing(1.0, 0.5) == Direction::third);
  CHECK_FALSE(detail::earlier_crossing(std::nullopt, std::nullopt).has_value());
  CHECK(*detail::crossing_time(0.0, 1.0, 1.0, 5.0, 3.0, true) == doctest::Approx(0.5));
}

TEST_CASE("tripling levels are consecutive powers of three") {
  auto g = test::rng(3);
  std::vector<double> t(400), y(400);
  double x = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<double>(i);
    x += test::uniform(g, -0.6, 0.6);
    y[i] = std::exp(x);
  }
  const auto a = tripling_sequence(t, y);
  CHECK(a == tripling_sequence(t, y));
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(std::abs(a[i].level - a[i - 1].level) == 1);
    CHECK(a[i].t >= a[i - 1].t);
    CHECK((a[i].direction == Direction::triple) == (a[i].level > a[i - 1].level));
  }
}

TEST_CASE("ledger of a silent field is zero") {
  auto req = ode_request(ScalarFunctionModel(), 1e-3, 0.05);
  req.record.snapshot_stride = 1;
  const auto tr = spde::simulate_path(spde::FieldState::constant(req.config.grid(), 0.7), req);
  const auto led = ledger_build(tr, req.b, req.sigma, req.config.alpha, req.config.eps_floor);
  REQUIRE(led.steps() == 50);
  for (std::size_t k = 0; k < led.steps(); ++k) {
    CHECK(led.dB[k] == 0.0);
    CHECK(led.dA[k] == 0.0);
    CHECK(std::abs(led.dN[k]) <= 1e-14);
  }
  CHECK(led.I.back() == doctest::Approx(led.I.front()).epsilon(1e-14));
  const auto bc = drift_bound_check_a(led, 0.0);
  CHECK(bc.pass);
}

TEST_CASE("ledger of a constant drift") {
  auto req = ode_request(ScalarFunctionModel::constant(1.0), 1e-3, 0.05);
  req.record.snapshot_stride = 1;
  const auto tr = spde::simulate_path(spde::FieldState::constant(req.config.grid(), 1.0), req);
  const auto led = ledger_build(tr, req.b, req.sigma, req.config.alpha, req.config.eps_floor);
  for (std::size_t k = 0; k < led.steps(); ++k) {
    CHECK(led.dB[k] == doctest::Approx(2.0 * std::numbers::pi * 1e-3).epsilon(1e-12));
    CHECK(led.I[k + 1] - led.I[0] == doctest::Approx(2.0 * std::numbers::pi * led.times[k + 1]).epsilon(1e-10));
  }
  CHECK(led.closure_error() <= 1e-12);
}

TEST_CASE("offline ledger equals the online accumulator") {
  auto req = ode_request(ScalarFunctionModel::power(1.0, 1.5, Symmetry::even), 1e-3, 0.05, 32);
  req.sigma = ScalarFunctionModel::power(1.0, 1.0, Symmetry::even);
  req.extra = spde::ExtraDrift::positivity;
  req.seed = 9;
  req.record.snapshot_stride = 1;
  LedgerAccumulator acc;
  const auto u0 = spde::FieldState::constant(req.config.grid(), 1.0);
  acc.start(u0);
  const auto tr = spde::simulate_path(u0, req, [&](const auto& a, const auto& b, const auto& t) { acc.observe(a, b, t); });
  const auto off = ledger_build(tr, req.b, req.sigma, req.config.alpha, req.config.eps_floor);
  const auto& on = acc.ledger();
  REQUIRE(on.steps() == off.steps());
  for (std::size_t k = 0; k < on.steps(); ++k) {
    CHECK(on.dB[k] == doctest::Approx(off.dB[k]).epsilon(1e-12));
    CHECK(on.dA[k] == doctest::Approx(off.dA[k]).epsilon(1e-12));
    CHECK(on.dS[k] == doctest::Approx(off.dS[k]).epsilon(1e-12));
  }
  CHECK(off.closure_error() <= 1e-10);
}

TEST_CASE("ledger needs every-step snapshots") {
  auto req = ode_request(ScalarFunctionModel(), 1e-3, 0.01);
  const auto tr = spde::simulate_path(spde::FieldState::constant(req.config.grid(), 1.0), req);
  CHECK_THROWS_AS(ledger_build(tr, req.b, req.sigma, 4.0, 1e-6), InsufficientDataError);
}

TEST_CASE("quadratic variation of the residual matches the sigma integral") {
  auto req = ode_request(ScalarFunctionModel::trigonometric(1.0, 1.0, 0.0), 1e-4, 0.2, 64);
  req.sigma = ScalarFunctionModel::trigonometric(1.0, 1.0, std::numbers::pi / 2.0);
  req.seed = 4;
  LedgerAccumulator acc;
  const auto u0 = spde::FieldState::constant(req.config.grid(), 0.3);
  acc.start(u0);
  spde::simulate_path(u0, req, [&](const auto& a, const auto& b, const auto& t) { acc.observe(a, b, t); });
  const auto& led = acc.ledger();
  CHECK(led.QV.back() / led.total(led.dS) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("drift bound negative control") {
  auto req = ode_request(ScalarFunctionModel::power(1.0, 2.0, Symmetry::even), 1e-4, 0.9);
  LedgerAccumulator acc;
  const auto u0 = spde::FieldState::constant(req.config.grid(), 1.0);
  acc.start(u0);
  spde::simulate_path(u0, req, [&](const auto& a, const auto& b, const auto& t) { acc.observe(a, b, t); });
  CHECK_FALSE(drift_bound_check_a(acc.ledger(), 1.0).pass);
  CHECK(drift_bound_check_a(acc.ledger(), 1e6).pass);
}

TEST_CASE("doob bound below the initial mass is vacuous") {
  DoobInputs in;
  in.initial_l1 = 2.0 * std::numbers::pi;
  in.C = 1.0;
  in.horizon = 0.5;
  const std::vector<double> sups(50, 1e9);
  const std::vector<double> Ms{1.0, 5.0};
  for (const auto& row : doob_bound_check(sups, Ms, in)) {
    CHECK(row.bound >= 1.0);
    CHECK(row.vacuous);
    CHECK(row.pass);
    CHECK(row.frequency == 1.0);
  }
}

TEST_CASE("doob rows never fail with a vacuous bound") {
  auto g = test::rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    DoobInputs in;
    in.initial_l1 = test::log_uniform(g, 1e-2, 1e2);
    in.C = test::log_uniform(g, 1e-3, 1e3);
    in.eps = test::log_uniform(g, 1e-3, 1.0);
    in.horizon = test::uniform(g, 0.01, 2.0);
    std::vector<double> sups(30);
    for (double& s : sups) s = test::log_uniform(g, 1e-2, 1e6);
    const std::vector<double> Ms{test::log_uniform(g, 1.0, 1e6)};
    for (const auto& row : doob_bound_check(sups, Ms, in)) {
      if (row.bound >= 1.0) CHECK(row.pass);
      CHECK(row.frequency <= 1.0);
    }
  }
}

TEST_CASE("explosion classification against the ODE") {
  // u' = u^2 from 2 blows up at 1/2
  auto req = ode_request(ScalarFunctionModel::power(1.0, 2.0, Symmetry::even), 1e-5, 1.0);
  req.record.row_stride = 100;
  const auto tr = spde::simulate_path(spde::FieldState::constant(req.config.grid(), 2.0), req);
  const auto v = classify_explosion(tr, req.config.u_cap, 1.0, false, req.b, req.sigma);
  CHECK(v.classification.outcome == Outcome::exploded);
  CHECK(v.classification.time == doctest::Approx(0.5).epsilon(0.05));

  auto zero = ode_request(ScalarFunctionModel(), 1e-3, 0.5);
  const auto z = spde::simulate_path(spde::FieldState::constant(zero.config.grid(), 0.0), zero);
  CHECK(classify_explosion(z, zero.config.u_cap, 0.5, true).classification.outcome == Outcome::survived);
  for (const auto& r : z.rows) CHECK(r.linf == 0.0);
}

TEST_CASE("u log u drift follows the doubly exponential profile") {
  auto req = ode_request(ScalarFunctionModel::log_iterated(1.0, 1, 0.0, Symmetry::odd), 1e-4, 1.0);
  req.record.row_stride = 1000;
  const auto tr = spde::simulate_path(spde::FieldState::constant(req.config.grid(), std::numbers::e), req);
  for (const auto& r : tr.rows) CHECK(r.linf == doctest::Approx(std::exp(std::exp(r.t))).epsilon(0.02));
  CHECK(classify_explosion(tr, req.config.u_cap, 1.0, false).classification.outcome == Outcome::survived);
}

TEST_CASE("raising the cap never turns an explosion into survival") {
  auto req = ode_request(ScalarFunctionModel::power(1.0, 2.0, Symmetry::even), 1e-4, 1.0);
  req.sigma = ScalarFunctionModel::power(0.5, 1.0, Symmetry::even);
  req.seed = 21;
  const auto tr = spde::simulate_path(spde::FieldState::constant(req.config.grid(), 1.5), req);
  std::optional<double> prev;
  bool exploded_before = false;
  for (double cap : {10.0, 100.0, 1e3, 1e4, 1e5, 1e6}) {
    const auto c = classify_from_rows(tr, cap, 1.0);
    if (c.outcome == Outcome::exploded) {
      if (prev) CHECK(c.time >= *prev);
      prev = c.time;
    }
    if (exploded_before) CHECK(c.outcome != Outcome::survived);
    exploded_before = exploded_before || c.outcome == Outcome::exploded;
  }
  CHECK(exploded_before);
  CHECK(classify_from_rows(tr, 1e7, 1.0).outcome == Outcome::inconclusive);
}

TEST_CASE("tripling window with the fitted kernel constant") {
  for (int m : {4, 5, 6}) {
    const auto w = tripling_window_check(m, 2.0 * std::numbers::pi, 1024);
    CAPTURE(m);
    CHECK(w.pass);
    CHECK(w.linf_after <= w.target * (1.0 + 1e-9));
    const double C = spde::kernel_sup_constant();
    CHECK(w.window == doctest::Approx(std::pow(C * 2.0 * std::numbers::pi, 2) * std::pow(3.0, -2.0 * (m - 2))));
  }
}

TEST_CASE("moment probe edge cases") {
  MomentProbeConfig cfg;
  cfg.phi = 0.0;
  cfg.paths = 4;
  cfg.nx = 16;
  cfg.dt = 1e-3;
  cfg.T_grid = {0.01, 0.02};
  const auto zero = moment_scaling_probe(cfg);
  for (const auto& p : zero.points) CHECK(p.moment == 0.0);
  cfg.p = 6.0;
  CHECK_THROWS_AS(moment_scaling_probe(cfg), ParameterError);
}

TEST_CASE("tripling audit") {
  // silent paths: no triplings at all
  auto quiet = ode_request(ScalarFunctionModel(), 1e-3, 0.2);
  quiet.config.u_cap = 2e3;
  const auto q = spde::simulate_path(spde::FieldState::constant(quiet.config.grid(), 1.0), quiet);
  const std::vector<TriplingPathData> qd{tripling_path_data(q, 1e3, 0.0)};
  const auto qs = tripling_probability_audit(qd, 0);
  CHECK(qs.mean_count_cap == 0.0);
  CHECK(qs.pass);

  auto req = ode_request(ScalarFunctionModel(), 1e-3, 0.5, 32);
  req.sigma = ScalarFunctionModel::power(1.0, 1.4, Symmetry::even);
  req.config.u_cap = 2e3;
  req.stopping.u_cap = 2e3;
  std::vector<TriplingPathData> data;
  for (std::uint32_t p = 0; p < 20; ++p) {
    req.path_id = p;
    req.seed = 5;
    const auto tr = spde::simulate_path(spde::FieldState::constant(req.config.grid(), 1.0), req);
    data.push_back(tripling_path_data(tr, 1e3, 1.0));
  }
  const auto s = tripling_probability_audit(data, 2);
  CHECK(s.paths == 20);
  CHECK(s.finite);
  CHECK(s.mean_count_cap <= s.mean_count_double);
}

TEST_CASE("lemma suites on a reduced sample") {
  LemmaSuiteOptions opts;
  opts.jensen_fields = 300;
  for (const auto& s : run_lemma_suites(opts)) {
    CAPTURE(s.name);
    CAPTURE(s.worst_case);
    CHECK(s.cases > 0);
    CHECK(s.pass());
  }
}
