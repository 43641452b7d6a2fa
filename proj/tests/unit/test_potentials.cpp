#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tcethermo/errors.hpp"
#include "tcethermo/julia.hpp"
#include "tcethermo/observable.hpp"

using namespace tce;

namespace {
RationalMap z_squared() { return RationalMap::polynomial({0.0, 0.0, 1.0}); }
RationalMap basilica() { return RationalMap::polynomial({-1.0, 0.0, 1.0}); }
const double kLog2 = std::log(2.0);
}  // namespace

TEST_CASE("julia_sample lies on the unit circle for z^2") {
  const auto pts = julia_sample(z_squared(), 1000, 42);
  REQUIRE(pts.size() == 1000);
  for (const SpherePoint& p : pts) CHECK(std::abs(std::abs(p.value()) - 1.0) < 1e-9);
}

TEST_CASE("julia_sample is forward invariant for z^2 - 1") {
  const RationalMap t = basilica();
  const auto pts = julia_sample(t, 1000, 3);
  const JuliaCloud cloud = JuliaCloud::from_points(pts);
  // the first sample's image is the last discarded burn-in point
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(cloud.near(eval(t, pts[i]), 1e-6));
  for (const SpherePoint& p : pts) CHECK(sph_deriv_abs(t, p) > 0.0);
}

TEST_CASE("julia_sample is deterministic") {
  const auto a = julia_sample(basilica(), 1, 99);
  const auto b = julia_sample(basilica(), 1, 99);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == b[0]);
  const auto c = julia_sample(basilica(), 1, 100);
  CHECK_FALSE(a[0] == c[0]);
}

TEST_CASE("tree cloud proximity queries") {
  const JuliaCloud cloud = JuliaCloud::from_tree(z_squared(), 10);
  CHECK(cloud.size() == 2047);
  CHECK(cloud.near(SpherePoint(std::polar(1.0, 0.001)), 1e-2));
  CHECK_FALSE(cloud.near(SpherePoint(0.0), 1e-2));
  CHECK(std::isinf(cloud.nearest_distance(SpherePoint::infinity(), 0.5)));
  CHECK(cloud.nearest_distance(SpherePoint(1.0), 1e-3) == 0.0);
}

TEST_CASE("observable evaluation") {
  const RationalMap t = z_squared();
  CHECK(Observable::constant(0.3)(t, SpherePoint(Complex(5.0, 1.0))) == 0.3);
  CHECK(Observable::re_poly({0.0, 1.0})(t, SpherePoint(Complex(0.0, 1.0))) == 0.0);
  CHECK(Observable::im_poly({0.0, 1.0})(t, SpherePoint(Complex(0.0, 1.0))) == 1.0);
  CHECK(Observable::neg_t_log_deriv(1.0)(t, SpherePoint(1.0)) == doctest::Approx(-kLog2).epsilon(1e-15));
  CHECK_THROWS_AS(Observable::neg_t_log_deriv(1.0)(t, SpherePoint(0.0)), CriticalOnJulia);

  const Observable combo = Observable::linear_combination(
      {{2.0, Observable::re_poly({0.0, 1.0})}, {-1.0, Observable::constant(0.5)}});
  CHECK(combo(t, SpherePoint(Complex(0.25, 3.0))) == doctest::Approx(0.0));
  CHECK(combo.uses_log_derivative() == false);
}

TEST_CASE("arc indicator") {
  const RationalMap t = z_squared();
  const Observable lower = Observable::arc_indicator(0.5, 1.0, 1e-8);
  CHECK(lower(t, SpherePoint(Complex(0.0, -1.0))) == 1.0);
  CHECK(lower(t, SpherePoint(Complex(0.0, 1.0))) == 0.0);
  CHECK(lower(t, SpherePoint(std::polar(1.0, -1e-3))) == 1.0);
  CHECK(lower(t, SpherePoint(std::polar(1.0, 1e-3))) == 0.0);
  const Observable wide = Observable::arc_indicator(0.0, 0.25, 0.1);
  CHECK(wide(t, SpherePoint(std::polar(1.0, 0.0))) == doctest::Approx(0.5));
  CHECK(wide(t, SpherePoint(std::polar(1.0, -2.0 * std::numbers::pi * 0.025))) == doctest::Approx(0.25));
  CHECK_THROWS_AS(Observable::arc_indicator(0.5, 0.2, 0.0), InvalidArgument);
}

TEST_CASE("birkhoff sums") {
  const RationalMap t = z_squared();
  CHECK(birkhoff_sum(t, Observable::constant(0.7), SpherePoint(3.0), 9) == 9 * 0.7);
  CHECK(birkhoff_sum(t, Observable::constant(1.0), SpherePoint(3.0), 13) == 13.0);
  const SpherePoint x(std::polar(1.0, 0.3));
  CHECK(std::abs(birkhoff_sum(t, Observable::neg_t_log_deriv(1.0), x, 6) + 6 * kLog2) < 1e-9);
  const Observable re = Observable::re_poly({0.0, 1.0});
  CHECK(birkhoff_sum(t, re, x, 1) == re(t, x));
}

TEST_CASE("cocycle identity and linearity") {
  const RationalMap t = basilica();
  const auto pts = julia_sample(t, 200, 5);
  const Observable a = Observable::re_poly({0.0, 1.0, Complex(0.0, 0.5)});
  const Observable b = Observable::neg_t_log_deriv(0.8);
  const Observable combo = Observable::linear_combination({{1.5, a}, {-0.25, b}});
  std::mt19937_64 rng(1);
  for (const SpherePoint& x : pts) {
    const int m = 1 + static_cast<int>(rng() % 15);
    const int n = 1 + static_cast<int>(rng() % 15);
    SpherePoint tm = x;
    for (int k = 0; k < m; ++k) tm = eval(t, tm);
    CHECK(std::abs(birkhoff_sum(t, a, x, m + n) - birkhoff_sum(t, a, x, m) - birkhoff_sum(t, a, tm, n)) < 1e-9);
    const double lin = 1.5 * birkhoff_sum(t, a, x, n) - 0.25 * birkhoff_sum(t, b, x, n);
    CHECK(std::abs(birkhoff_sum(t, combo, x, n) - lin) < 1e-10);
  }
}

TEST_CASE("critical point guard") {
  const Observable geo = Observable::neg_t_log_deriv(1.0).with_name("geometric");
  const JuliaCloud circle = JuliaCloud::from_tree(z_squared(), 8);
  CHECK_NOTHROW(check_critical_guard(z_squared(), geo, circle));
  const JuliaCloud basil = JuliaCloud::from_tree(basilica(), 8);
  CHECK_NOTHROW(check_critical_guard(basilica(), geo, basil));
  // z^2 + i: the critical point is preperiodic and lies on J
  const RationalMap dendrite = RationalMap::polynomial({Complex(0.0, 1.0), 0.0, 1.0});
  const JuliaCloud dcloud = JuliaCloud::from_tree(dendrite, 8);
  CHECK_THROWS_AS(check_critical_guard(dendrite, geo, dcloud), CriticalOnJulia);
  CHECK_NOTHROW(check_critical_guard(dendrite, Observable::re_poly({0.0, 1.0}), dcloud));
}

TEST_CASE("find_observable") {
  const std::vector<Observable> list{Observable::constant(1.0).with_name("one")};
  CHECK(find_observable(list, "one") == 0);
  CHECK_THROWS_AS(find_observable(list, "two"), UnknownObservable);
}

TEST_CASE("adaptive cloud resolves weakly repelling regions") {
  const RationalMap t = basilica();
  const JuliaCloud cloud = JuliaCloud::adaptive(t, 1e-4);
  CHECK(cloud.resolved());
  // alpha fixed point (multiplier 1.236) and its preimage
  const double alpha = (1.0 - std::sqrt(5.0)) / 2.0;
  CHECK(cloud.near(SpherePoint(alpha), 1e-4));
  CHECK(cloud.near(SpherePoint(-alpha), 1e-4));
  const JuliaCloud circle = JuliaCloud::adaptive(z_squared(), 1e-4);
  CHECK(circle.resolved());
  for (int k = 0; k < 1000; ++k) CHECK(circle.near(SpherePoint(std::polar(1.0, 0.00628 * k + 0.001)), 1e-4));
  CHECK_FALSE(circle.near(SpherePoint(1.001), 1e-4));
}
