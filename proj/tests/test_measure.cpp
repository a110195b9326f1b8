#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "doctest.h"
#include "levelset/errors.hpp"
#include "levelset/functions.hpp"
#include "levelset/measure.hpp"
#include "levelset/montecarlo.hpp"
#include "levelset/special.hpp"

using namespace levelset;

namespace {

TestFunction ind(double a, double b, double amp = 1.0) {
  // amp * indicator of [a, b] in one dimension
  return TestFunction::shifted({0.5 * (a + b)}, TestFunction::ball(1, amp, 0.5 * (b - a)));
}

// Hand-derived measure for u = v = indicator of [-1, 1], p = 1, lambda >= 1:
// the 2x2 square contributes the band |x - y| <= 2/lambda, the two
// one-sided regions contribute a triangle of legs 1/lambda at each end.
double two_ball_closed_form(double lambda) {
  const double a = 2.0 / lambda;
  return 4.0 - (2.0 - a) * (2.0 - a) + 2.0 / (lambda * lambda);
}

double grid(const LevelSetQuery& q, double h) {
  return grid_bruteforce_measure(q, required_grid_halfwidth(q, h) + h, h).measure;
}

}  // namespace

TEST_CASE("exact single-function identity") {
  const auto u = TestFunction::ball(1, 1.0, 1.0);
  const auto z = TestFunction::zero(1);
  auto m = exact_single_measure({u, z, 1.0, 1.0});
  CHECK(m.measure == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(m.method == Method::Exact);
  REQUIRE(m.error_bound);
  CHECK(*m.error_bound == 0.0);
  CHECK(exact_single_measure({u, z, 1.0, 10.0}).measure == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(exact_single_measure({z, z, 1.0, 3.0}).measure == 0.0);
  CHECK(exact_single_measure({z, u, 1.0, 1.0}).measure == doctest::Approx(4.0));
  CHECK(std::isinf(exact_single_measure({TestFunction::weak_lp_witness(1, 1.0), z, 1.0, 1.0}).measure));
  CHECK_THROWS_AS(exact_single_measure({u, u, 1.0, 1.0}), UsageError);
  CHECK_THROWS_AS(exact_single_measure({u, z, 0.5, 1.0}), UsageError);
  CHECK_THROWS_AS(exact_single_measure({u, z, 1.0, 0.0}), UsageError);
  CHECK_THROWS_AS(exact_single_measure({u, TestFunction::zero(2), 1.0, 1.0}), UsageError);
}

TEST_CASE("radial quadrature reproduces the exact identity") {
  const auto z1 = TestFunction::zero(1);
  auto m = radial_quadrature_measure({TestFunction::ball(1, 1.0, 1.0), z1, 1.0, 1.0}, 1e-8);
  CHECK(std::abs(m.measure - 4.0) <= 1e-8);
  CHECK(m.method == Method::Quadrature);
  CHECK(*m.error_bound == 1e-8);
  CHECK(radial_quadrature_measure({z1, z1, 1.0, 2.0}, 1e-8).measure == 0.0);

  struct Case {
    TestFunction u;
    double p;
    double lambda;
  };
  const std::vector<Case> cases = {
      {TestFunction::ball(2, 1.0, 1.0), 1.0, 0.7},
      {TestFunction::ball(3, 2.0, 0.5), 2.0, 1.5},
      {TestFunction::radial_step(2, {0.5, 1.0}, {-2.0, 1.0}), 1.5, 0.3},
      {TestFunction::truncated_power(1, 0.5, 1.0), 1.0, 2.0},
      {TestFunction::truncated_power(2, 0.5, 1.0, 3.0), 2.0, 1.0},
      {TestFunction::gaussian(1), 2.0, 1.0},
      {TestFunction::gaussian(2, 2.0), 1.0, 0.5},
      {ind(0.0, 1.0), 1.0, 0.25},
  };
  for (const auto& c : cases) {
    const auto z = TestFunction::zero(c.u.dimension());
    const double exact = exact_single_measure({c.u, z, c.p, c.lambda}).measure;
    const double tol = 1e-7 * exact;
    CAPTURE(c.u.to_spec());
    CHECK(std::abs(radial_quadrature_measure({c.u, z, c.p, c.lambda}, tol).measure - exact) <= 2 * tol);
    CHECK(std::abs(radial_quadrature_measure({z, c.u, c.p, c.lambda}, tol).measure - exact) <= 2 * tol);
  }
}

TEST_CASE("radial quadrature against a hand-derived two-function closed form") {
  const auto b = TestFunction::ball(1, 1.0, 1.0);
  for (double lambda : {1.0, 1.5, 4.0, 10.0, 1000.0}) {
    const double ref = two_ball_closed_form(lambda);
    CAPTURE(lambda);
    CHECK(std::abs(radial_quadrature_measure({b, b, 1.0, lambda}, 1e-10).measure - ref) <= 2e-10);
  }
  CHECK(two_ball_closed_form(1000.0) == doctest::Approx(0.007998).epsilon(1e-12));
}

TEST_CASE("grid oracle examples") {
  const auto z = TestFunction::zero(1);
  CHECK(grid_bruteforce_measure({ind(0, 1), z, 1.0, 1.0}, 5.0, 1e-3).measure == doctest::Approx(2.0).epsilon(0.005));
  CHECK(grid_bruteforce_measure({ind(0, 1), z, 1.0, 1.0}, 5.0, 1e-3).method == Method::Grid);
  CHECK(grid_bruteforce_measure({ind(0, 1), ind(4, 5), 1.0, 1e6}, 6.0, 1e-3).measure <= 4.1 / 1e6);
  CHECK(grid_bruteforce_measure({z, z, 1.0, 1.0}, 1.0, 1e-2).measure == 0.0);
  CHECK_FALSE(grid_bruteforce_measure({ind(0, 1), z, 1.0, 1.0}, 5.0, 1e-3).error_bound);

  try {
    grid_bruteforce_measure({ind(0, 1), ind(4, 5), 1.0, 1e6}, 5.0, 1e-3);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("need at least 5.00") != std::string::npos);
  }
  CHECK_THROWS_AS(grid_bruteforce_measure({TestFunction::ball(2, 1, 1), TestFunction::zero(2), 1.0, 1.0}, 5, 1e-2),
                  UnsupportedError);
}

TEST_CASE("grid oracle against the closed forms") {
  const auto b = TestFunction::ball(1, 1.0, 1.0);
  for (double lambda : {1.0, 10.0, 1000.0}) {
    CHECK(grid({b, b, 1.0, lambda}, 1e-3) == doctest::Approx(two_ball_closed_form(lambda)).epsilon(0.01));
  }
  const auto z = TestFunction::zero(1);
  const std::vector<TestFunction> indicators = {
      TestFunction::ball(1, 1.0, 1.0), TestFunction::ball(1, 2.0, 0.5), ind(0, 1), ind(4, 5),
      TestFunction::radial_step(1, {0.5, 1.0}, {-1.0, 1.0}), ind(-2, 0.5, -3.0)};
  for (const auto& u : indicators) {
    for (double lambda : {0.5, 1.0, 4.0}) {
      const LevelSetQuery q{u, z, 1.0, lambda};
      CAPTURE(u.to_spec());
      CAPTURE(lambda);
      CHECK(grid(q, 2e-3) == doctest::Approx(exact_single_measure(q).measure).epsilon(0.01));
    }
  }
}

TEST_CASE("grid and quadrature agree on a radial two-function pair") {
  const auto u = TestFunction::ball(1, 1.0, 1.0);
  const auto v = TestFunction::radial_step(1, {0.3, 0.8}, {-2.0, 0.5});
  for (double p : {1.0, 2.0}) {
    for (double lambda : {0.8, 2.0, 5.0}) {
      const LevelSetQuery q{u, v, p, lambda};
      const double quad = radial_quadrature_measure(q, 1e-8).measure;
      CAPTURE(p);
      CAPTURE(lambda);
      CHECK(grid(q, 1e-3) == doctest::Approx(quad).epsilon(0.005));
      CHECK(std::abs(radial_quadrature_measure(q.swapped(), 1e-8).measure - quad) <= 2e-8);
    }
  }
}

TEST_CASE("quadrature agrees with Monte Carlo for N = 2 and N = 3") {
  for (int n : {2, 3}) {
    const auto u = TestFunction::ball(n, 1.0, 1.0);
    const auto v = TestFunction::radial_step(n, {0.5, 0.8}, {-1.5, 0.7});
    const LevelSetQuery q{u, v, 1.0, 1.3};
    const double quad = radial_quadrature_measure(q, 1e-6).measure;
    const auto mc = estimate_measure(q, 400000, 99);
    CAPTURE(n);
    CHECK(std::abs(mc.value - quad) <= 4.0 * mc.std_error);
  }
}

TEST_CASE("quadrature rejects inputs it cannot reduce") {
  const auto b = TestFunction::ball(1, 1.0, 1.0);
  CHECK_THROWS_AS(radial_quadrature_measure({b, ind(4, 5), 1.0, 1.0}, 1e-6), UnsupportedError);
  CHECK_THROWS_AS(radial_quadrature_measure({b, b, 1.0, 1.0}, 0.0), UsageError);
  CHECK_THROWS_AS(radial_quadrature_measure({TestFunction::ball(4, 1, 1), TestFunction::zero(4), 1.0, 1.0}, 1e-6),
                  UnsupportedError);
}

TEST_CASE("symmetry, monotonicity, scaling, translation and dilation on the grid oracle") {
  const auto u = ind(0, 1);
  const auto v = ind(0.5, 2.5, -0.75);
  const double h = 4e-3;
  const double box = 24.0;  // contains every bounding region below
  auto gb = [](const TestFunction& a, const TestFunction& b, double p, double lambda, double hh, double bx) {
    return grid_bruteforce_measure({a, b, p, lambda}, bx, hh).measure;
  };
  auto g = [&](const TestFunction& a, const TestFunction& b, double p, double lambda) { return gb(a, b, p, lambda, h, box); };
  for (double p : {1.0, 2.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.8, 1.0, 2.0, 5.0}) {
      const double m = g(u, v, p, lambda);
      // Swap: the y grid is offset, so agreement is within grid resolution.
      CHECK(g(v, u, p, lambda) == doctest::Approx(m).epsilon(0.01));
      // Nested sets on an identical grid: exact monotonicity.
      CHECK(m <= prev);
      prev = m;
      // Power-of-two factors keep the cell classification identical.
      for (double c : {2.0, 0.5}) {
        CHECK(g(TestFunction::scaled(c, u), TestFunction::scaled(c, v), p, lambda) == g(u, v, p, lambda / c));
        CHECK(g(TestFunction::scaled(-c, u), TestFunction::scaled(-c, v), p, lambda) == g(u, v, p, lambda / c));
      }
      CHECK(g(TestFunction::shifted({-0.625}, u), TestFunction::shifted({-0.625}, v), p, lambda) ==
            doctest::Approx(m).epsilon(0.01));
    }
  }
  // Dilation with delta = 2 for p = 1: doubling h and the box maps cells onto cells.
  const double delta = 2.0;
  for (double lambda : {0.5, 1.0, 3.0}) {
    const double dilated = gb(TestFunction::scaled(1.0, u, delta), TestFunction::scaled(1.0, v, delta), 1.0, lambda,
                             delta * h, delta * box);
    CHECK(dilated == delta * delta * g(u, v, 1.0, lambda * delta));
  }
}

TEST_CASE("quadrature scaling, translation and dilation") {
  const auto u = TestFunction::ball(2, 1.0, 1.0);
  const auto v = TestFunction::radial_step(2, {0.4, 1.1}, {-1.0, 0.6});
  for (double p : {1.0, 2.0}) {
    const double lambda = 1.2;
    const double tol = 1e-8;
    const double base = radial_quadrature_measure({u, v, p, lambda}, tol).measure;
    for (double c : {0.5, 2.0, -3.0}) {
      const double lhs =
          radial_quadrature_measure({TestFunction::scaled(c, u), TestFunction::scaled(c, v), p, lambda}, tol).measure;
      CHECK(std::abs(lhs - radial_quadrature_measure({u, v, p, lambda / std::abs(c)}, tol).measure) <= 4 * tol);
    }
    const auto su = TestFunction::shifted({1.0, -2.0}, u);
    const auto sv = TestFunction::shifted({1.0, -2.0}, v);
    CHECK(std::abs(radial_quadrature_measure({su, sv, p, lambda}, tol).measure - base) <= 4 * tol);
    const double delta = 1.7;
    const double dil = radial_quadrature_measure(
                           {TestFunction::scaled(1.0, u, delta), TestFunction::scaled(1.0, v, delta), p, lambda}, tol)
                           .measure;
    const double ref = std::pow(delta, 4) * radial_quadrature_measure({u, v, p, lambda * std::pow(delta, 2 / p)}, tol).measure;
    CHECK(std::abs(dil - ref) <= 4 * tol * std::pow(delta, 4));
  }
}

TEST_CASE("grid kernels: serial and parallel counts are identical") {
  const LevelSetQuery q{ind(0, 1), ind(0.5, 2.5, -0.75), 1.0, 0.7};
  const auto in = kernels::make_grid_inputs(q, 6.0, 2e-3);
  CHECK(kernels::grid_count_serial(in) == kernels::grid_count_parallel(in));
  CHECK(kernels::grid_count_serial(in) > 0);
}
