#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "shelab/errors.hpp"
#include "shelab/models/conditions.hpp"
#include "shelab/models/scalar_model.hpp"
#include "support.hpp"

using namespace shelab;
using namespace shelab::models;

namespace {

ScalarFunctionModel one_plus_u_log() { return ScalarFunctionModel::affine_log_power(1.0, 1.0, 1.0, 1.0, 1.0); }

// central differences, used as an independent check on the jets
double fd1(const ScalarFunctionModel& m, double u) {
  const double h = 1e-5 * std::max(1.0, std::abs(u));
  return (m.value(u + h) - m.value(u - h)) / (2.0 * h);
}
double fd2(const ScalarFunctionModel& m, double u) {
  const double h = 1e-4 * std::max(1.0, std::abs(u));
  return (m.value(u + h) - 2.0 * m.value(u) + m.value(u - h)) / (h * h);
}

}  // namespace

TEST_CASE("power family closed forms") {
  const auto sq = ScalarFunctionModel::power(1.0, 2.0);
  CHECK(sq.evaluate(3.0, 0) == doctest::Approx(9.0));
  CHECK(sq.evaluate(5.0, 2) == doctest::Approx(2.0));
  CHECK(sq.evaluate(5.0, 1) == doctest::Approx(10.0));
}

TEST_CASE("affine log power at e - 1") {
  // (1 + u) log(1 + u) at u = e - 1 is e * 1
  const double e = std::numbers::e;
  CHECK(one_plus_u_log().evaluate(e - 1.0, 0) == doctest::Approx(e).epsilon(1e-14));
}

TEST_CASE("domain and range errors") {
  const auto logm = ScalarFunctionModel::affine_log_power(1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(logm.evaluate(-2.0, 0), DomainError);
  const auto tab = ScalarFunctionModel::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
  CHECK(tab.evaluate(1.5, 0) == doctest::Approx(2.5));
  CHECK_THROWS_AS(tab.evaluate(3.0, 0), RangeError);
}

TEST_CASE("jets agree with finite differences") {
  auto g = test::rng(1);
  const std::vector<ScalarFunctionModel> ms{
      ScalarFunctionModel::power(1.3, 1.7, Symmetry::even),
      ScalarFunctionModel::power(0.5, 3.0, Symmetry::odd),
      one_plus_u_log(),
      ScalarFunctionModel::log_iterated(1.0, 2, 3.0),
      ScalarFunctionModel::exponential(2.0, 0.5, 1.0),
      ScalarFunctionModel::trigonometric(1.5, 2.0, 0.3, 0.1),
  };
  for (const auto& m : ms) {
    for (int i = 0; i < 200; ++i) {
      const double u = test::uniform(g, 0.5, 20.0);
      const Jet j = m.jet(u);
      CHECK(j.v == doctest::Approx(m.value(u)).epsilon(1e-12));
      CHECK(test::close_rel(j.d1, fd1(m, u), 1e-6));
      CHECK(test::close_rel(j.d2, fd2(m, u), 1e-4));
    }
  }
}

TEST_CASE("increasing convex families have nonnegative second differences") {
  const std::vector<ScalarFunctionModel> ms{ScalarFunctionModel::power(1.0, 1.5), ScalarFunctionModel::power(2.0, 2.0),
                                            one_plus_u_log(), ScalarFunctionModel::exponential(1.0, 1.0)};
  const auto grid = log_grid(1e-2, 1e2, 300);
  for (const auto& m : ms) {
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double hl = grid[i] - grid[i - 1], hr = grid[i + 1] - grid[i];
      const double second = 2.0 * ((m.value(grid[i + 1]) - m.value(grid[i])) / hr -
                                   (m.value(grid[i]) - m.value(grid[i - 1])) / hl) / (hl + hr);
      CHECK(second >= -1e-9);
    }
  }
}

TEST_CASE("cutoff clamps outside the band") {
  const auto sq = cutoff(ScalarFunctionModel::power(1.0, 2.0), 2.0);
  CHECK(sq.evaluate(5.0, 0) == doctest::Approx(4.0));
  CHECK(sq.evaluate(1.0, 0) == doctest::Approx(1.0));
  const auto cube = cutoff(ScalarFunctionModel::power(1.0, 3.0, Symmetry::odd), 3.0);
  CHECK(cube.evaluate(-10.0, 0) == doctest::Approx(-27.0));

  const auto base = ScalarFunctionModel::power(1.0, 2.5, Symmetry::odd);
  const auto cut = cutoff(base, 7.0);
  for (int i = 0; i <= 4000; ++i) {
    const double u = -20.0 + 40.0 * i / 4000.0;
    if (std::abs(u) <= 7.0) CHECK(cut.value(u) == base.value(u));
    else CHECK(cut.value(u) == base.value(u > 0 ? 7.0 : -7.0));
  }
}

TEST_CASE("osgood classification") {
  const auto sq = osgood_classify(ScalarFunctionModel::power(1.0, 2.0), 1.0);
  REQUIRE(sq.classification == OsgoodClass::convergent);
  REQUIRE(sq.value.has_value());
  CHECK(std::abs(*sq.value - 1.0) <= 1e-6);
  CHECK(osgood_classify(one_plus_u_log(), 1.0).classification == OsgoodClass::divergent);
  CHECK(osgood_classify(ScalarFunctionModel::power(1.0, 1.0), 1.0).classification == OsgoodClass::divergent);
  CHECK_THROWS_AS(osgood_classify(ScalarFunctionModel::trigonometric(1.0, 1.0, 0.0), 1.0), PreconditionError);
}

TEST_CASE("osgood classification is invariant under scaling") {
  const std::vector<ScalarFunctionModel> hs{ScalarFunctionModel::power(1.0, 2.0), ScalarFunctionModel::power(1.0, 1.2),
                                            one_plus_u_log(), ScalarFunctionModel::power(1.0, 1.0),
                                            ScalarFunctionModel::log_iterated(1.0, 2, 0.0, Symmetry::odd, Domain::full_line, 1.0)};
  for (const auto& h : hs) {
    CHECK(osgood_classify(h, 1.0).classification == osgood_classify(scaled(h, 7.0), 1.0).classification);
  }
}

TEST_CASE("convexity ratio") {
  const auto grid = log_grid(1e-2, 1e6, 200);
  for (double beta : {1.25, 1.5, 2.0, 3.0}) {
    const auto r = convexity_ratio_check(ScalarFunctionModel::power(2.0, beta), grid);
    CHECK(r.pass);
    CHECK(r.max_ratio == doctest::Approx((beta - 1.0) / beta).epsilon(1e-9));
  }
  CHECK(convexity_ratio_check(ScalarFunctionModel::affine_log_power(1.0, 1.0, 1.0, 1.0, 2.0), grid).pass);
  const auto ex = convexity_ratio_check(ScalarFunctionModel::exponential(1.0, 1.0), log_grid(1e-2, 50.0, 100));
  CHECK(ex.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(convexity_ratio_check(ScalarFunctionModel::constant(1.0), grid), SingularPointError);
}

TEST_CASE("assumption (a) examples") {
  const auto pw = [](double A, double e) { return ScalarFunctionModel::power(A, e, Symmetry::even); };
  const auto sat = check_assumption_a(pw(1.0, 1.5), pw(1.0, 1.4), pw(1.0, 1.5), 1.0, 10.0);
  CHECK(sat.verdict == Verdict::satisfied);
  CHECK(sat.drift_constant == doctest::Approx(2.0 * std::numbers::pi * sat.theta_used));

  const auto bad = check_assumption_a(pw(1.0, 2.0), pw(1.0, 1.0), pw(1.0, 2.0), 1.0, 10.0);
  CHECK(bad.verdict == Verdict::violated);
  CHECK(bad.has_violation());

  const auto small = check_assumption_a(pw(0.01, 2.0), pw(1.0, 1.5), pw(0.01, 2.0), 1.0, 10.0);
  CHECK(small.verdict == Verdict::satisfied);

  CHECK_THROWS_AS(check_assumption_a(pw(1.0, 2.0), pw(1.0, 1.5), std::nullopt, 1.0, 10.0), PreconditionError);
}

TEST_CASE("assumption (a) reproduces the power-law regime") {
  const auto pw = [](double A, double e) { return ScalarFunctionModel::power(A, e, Symmetry::even); };
  for (double beta : {1.25, 1.5, 2.0}) {
    for (double gamma : {0.75, 1.0, 1.2, 1.4, 1.5}) {
      const bool strict = beta + 1.0 < 2.0 * gamma;
      const bool boundary = std::abs(beta + 1.0 - 2.0 * gamma) < 1e-12;
      if (boundary) {
        const auto probe = check_assumption_a(pw(1.0, beta), pw(1.0, gamma), pw(1.0, beta), 1.0, 10.0);
        REQUIRE(probe.admissible_amplitude.has_value());
        const double limit = *probe.admissible_amplitude;
        for (double f : {0.5, 2.0}) {
          const double A = f * limit;
          const auto r = check_assumption_a(pw(A, beta), pw(1.0, gamma), pw(A, beta), 1.0, 10.0);
          CAPTURE(beta);
          CAPTURE(A);
          CHECK((r.verdict == Verdict::satisfied) == (f < 1.0));
        }
      } else {
        const auto r = check_assumption_a(pw(1.0, beta), pw(1.0, gamma), pw(1.0, beta), 1.0, 10.0);
        CAPTURE(beta);
        CAPTURE(gamma);
        CHECK((r.verdict == Verdict::satisfied) == strict);
      }
    }
  }
}

TEST_CASE("assumption (b) examples") {
  const auto b = ScalarFunctionModel::log_iterated(1.0, 1, 0.0, Symmetry::odd);
  const auto h = ScalarFunctionModel::affine_log_power(1.0, 1.0, 1.0, 1.0, 1.0, Symmetry::none, Domain::half_line, 1.0);
  const auto sigma = ScalarFunctionModel::power(1.0, 0.8, Symmetry::even);
  CHECK(check_assumption_b(b, sigma, h, 0.1, 4.0, 0.7).verdict == Verdict::satisfied);

  const auto sq = ScalarFunctionModel::power(1.0, 2.0, Symmetry::even);
  const auto osg = check_assumption_b(sq, sigma, sq, 0.1, 4.0, 0.7);
  CHECK(osg.verdict == Verdict::violated);
  REQUIRE(osg.osgood.has_value());
  CHECK(osg.osgood->classification == OsgoodClass::convergent);

  const auto noise = ScalarFunctionModel::power(1.0, 0.8, Symmetry::even, Domain::full_line, 1.0);
  CHECK(check_assumption_b(ScalarFunctionModel(), noise, ScalarFunctionModel::constant(1.0), 0.1, 4.0, 0.7).verdict ==
        Verdict::satisfied);

  CHECK_THROWS_AS(check_assumption_b(b, sigma, h, 0.1, 4.0, 1.2), ParameterError);
}

TEST_CASE("fg pair inverses") {
  const auto lin = fg_pair(ScalarFunctionModel::power(1.0, 1.0));
  CHECK(lin.f_inverse(9.0) * lin.g_inverse(9.0) == doctest::Approx(9.0).epsilon(1e-10));
  CHECK(lin.f_inverse(9.0) == doctest::Approx(3.0).epsilon(1e-10));

  const auto sq = fg_pair(ScalarFunctionModel::power(1.0, 2.0));
  CHECK(sq.f_inverse(8.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(sq.g_inverse(8.0) == doctest::Approx(4.0).epsilon(1e-10));

  const auto lg = fg_pair(one_plus_u_log());
  for (double w : {1.0, 10.0, 1e3}) {
    // oracle: f^{-1} by plain bisection on u (1+u) log(1+u) = w
    double lo = 0.0, hi = w + 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid * (1.0 + mid) * std::log1p(mid) < w ? lo : hi) = mid;
    }
    CHECK(lg.f_inverse(w) == doctest::Approx(lo).epsilon(1e-9));
    CHECK(lg.f_inverse(w) * lg.g_inverse(w) / w == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("g transform closed forms") {
  const auto g1 = g_transform(ScalarFunctionModel::power(1.0, 1.0));
  const auto g2 = g_transform(ScalarFunctionModel::power(1.0, 2.0));
  const auto g3 = g_transform(ScalarFunctionModel::affine_log_power(1.0, 0.0, 1.0, 1.0, 1.0));
  for (double u : {-3.0, 0.0, 0.5, 4.0, 30.0}) {
    CHECK(g1.value(u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g2.value(u) == doctest::Approx(std::exp(u)).epsilon(1e-12));
    CHECK(g3.value(u) == doctest::Approx(std::log1p(std::exp(u))).epsilon(1e-12));
  }
  // far beyond exp overflow the log-domain path keeps the value finite
  CHECK(std::isfinite(g3.value(800.0)));
  CHECK(g3.value(800.0) == doctest::Approx(800.0).epsilon(1e-12));
}

TEST_CASE("capital G closed forms") {
  CHECK(capital_G(ScalarFunctionModel::constant(1.0), 0.75, 5.0) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(capital_G(ScalarFunctionModel::exponential(1.0, 1.0), 0.75, 2.0) ==
        doctest::Approx((std::exp(-4.0) - std::exp(-8.0)) / 4.0).epsilon(1e-9));
  const auto one_plus = ScalarFunctionModel::power(1.0, 1.0, Symmetry::none, Domain::full_line, 1.0);
  CHECK(capital_G(one_plus, 0.75, 10.0) == doctest::Approx(0.25 * std::log(41.0 / 5.0)).epsilon(1e-9));

  double prev = 0.0, prev_step = 1e300;
  for (int i = 1; i <= 40; ++i) {
    const double x = 1.0 + 0.5 * i;
    const double v = capital_G(one_plus, 0.75, x);
    CHECK(v >= prev);
    CHECK(v - prev <= prev_step + 1e-12);
    prev_step = v - prev;
    prev = v;
  }
}

TEST_CASE("jensen examples") {
  const auto sq = ScalarFunctionModel::power(1.0, 2.0);
  const std::vector<double> zero(64, 0.0), one(64, 1.0);
  const auto z = jensen_check(sq, zero);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.pass);
  const auto c = jensen_check(sq, one);
  CHECK(c.lhs == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(c.rhs == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(c.pass);

  std::vector<double> wave(256);
  for (std::size_t i = 0; i < wave.size(); ++i) {
    wave[i] = 1.0 + std::sin(-std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / 256.0);
  }
  const auto w = jensen_check(sq, wave);
  CHECK(w.pass);
  CHECK(w.lhs < w.rhs - 1e-3);

  std::vector<double> neg(8, 1.0);
  neg[3] = -0.5;
  CHECK_THROWS_AS(jensen_check(sq, neg), PreconditionError);
}
