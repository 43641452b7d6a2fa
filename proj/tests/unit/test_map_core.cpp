#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tcethermo/errors.hpp"
#include "tcethermo/rational_map.hpp"

using namespace tce;

namespace {
RationalMap z_squared() { return RationalMap::polynomial({0.0, 0.0, 1.0}); }
RationalMap basilica() { return RationalMap::polynomial({-1.0, 0.0, 1.0}); }
}  // namespace

TEST_CASE("eval on polynomials") {
  CHECK(eval(z_squared(), SpherePoint(1.0)) == SpherePoint(1.0));
  CHECK(eval(basilica(), SpherePoint(0.0)) == SpherePoint(-1.0));
  CHECK(eval(z_squared(), SpherePoint::infinity()).is_infinity());
}

TEST_CASE("eval on a rational map handles poles and infinity") {
  // T(z) = (z^2 + 1) / (2z)
  const RationalMap t = RationalMap::rational({1.0, 0.0, 1.0}, {0.0, 2.0, 0.0});
  CHECK(t.degree() == 2);
  CHECK_FALSE(t.is_polynomial());
  CHECK(eval(t, SpherePoint(0.0)).is_infinity());
  CHECK(eval(t, SpherePoint::infinity()).is_infinity());
  const SpherePoint w = eval(t, SpherePoint(2.0));
  CHECK(std::abs(w.value() - Complex(1.25, 0.0)) < 1e-15);
  const SpherePoint far = eval(t, SpherePoint(Complex(1e6, 0.0)));
  CHECK(std::abs(far.value().real() - 5e5) < 1e-6);
}

TEST_CASE("common roots are rejected") {
  CHECK_THROWS_AS(RationalMap::rational({-1.0, 0.0, 1.0}, {-1.0, 1.0, 0.0}), InvalidMap);
  CHECK_THROWS_AS(RationalMap::polynomial({1.0, 2.0}), InvalidMap);
}

TEST_CASE("spherical derivative") {
  CHECK(sph_deriv_abs(z_squared(), SpherePoint(1.0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sph_deriv_abs(z_squared(), SpherePoint(0.0)) == 0.0);
  CHECK(sph_deriv_abs(z_squared(), SpherePoint::infinity()) == 0.0);
  // |T'| on the circle is 2 everywhere
  for (int k = 0; k < 16; ++k) {
    const SpherePoint z(std::polar(1.0, 0.37 * k));
    CHECK(sph_deriv_abs(z_squared(), z) == doctest::Approx(2.0).epsilon(1e-14));
  }
  CHECK(deriv_abs(z_squared(), SpherePoint(Complex(0.0, 3.0)), DerivativeKind::Euclidean) ==
        doctest::Approx(6.0));
}

TEST_CASE("chain rule for the spherical derivative") {
  const RationalMap maps[] = {basilica(), RationalMap::rational({1.0, 0.0, 1.0}, {0.0, 2.0, 0.0}),
                              RationalMap::polynomial({Complex(-0.12, 0.74), 0.0, 1.0})};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const RationalMap& t : maps) {
    const RationalMap t2 = t.compose(t);
    CHECK(t2.degree() == 4);
    for (int i = 0; i < 1000; ++i) {
      const SpherePoint z(Complex(u(rng), u(rng)));
      const double lhs = sph_deriv_abs(t2, z);
      const double rhs = sph_deriv_abs(t, eval(t, z)) * sph_deriv_abs(t, z);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("preimages of z^2") {
  const PreimageSet p = preimages(z_squared(), SpherePoint(1.0));
  REQUIRE(p.size() == 2);
  CHECK(std::abs(p[0].point.value() - Complex(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(p[1].point.value() - Complex(1.0, 0.0)) < 1e-15);
  CHECK(p[0].multiplicity == 1);

  const PreimageSet c = preimages(z_squared(), SpherePoint(0.0));
  REQUIRE(c.size() == 1);
  CHECK(c[0].multiplicity == 2);
  CHECK(std::abs(c[0].point.value()) < 1e-8);

  const PreimageSet inf = preimages(z_squared(), SpherePoint::infinity());
  REQUIRE(inf.size() == 1);
  CHECK(inf[0].point.is_infinity());
  CHECK(inf[0].multiplicity == 2);
}

TEST_CASE("preimages of z^2 - 1") {
  const PreimageSet p = preimages(basilica(), SpherePoint(1.0));
  REQUIRE(p.size() == 2);
  CHECK(std::abs(p[0].point.value() + std::numbers::sqrt2) < 1e-14);
  CHECK(std::abs(p[1].point.value() - std::numbers::sqrt2) < 1e-14);
}

TEST_CASE("multiplicity conservation and residuals") {
  const RationalMap maps[] = {basilica(), z_squared(), RationalMap::rational({1.0, 0.0, 1.0}, {0.0, 2.0, 0.0}),
                              RationalMap::polynomial({0.25, 0.0, 0.0, 1.0})};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 2.0);
  for (const RationalMap& t : maps) {
    for (int i = 0; i < 10000; ++i) {
      const SpherePoint x(Complex(g(rng), g(rng)));
      const PreimageSet p = preimages(t, x);
      int total = 0;
      for (const Preimage& y : p) {
        total += y.multiplicity;
        REQUIRE(chordal(eval(t, y.point), x) < 1e-12);
      }
      REQUIRE(total == t.degree());
      REQUIRE(static_cast<int>(p.size()) == t.degree());
    }
  }
}

TEST_CASE("fixed and critical points") {
  const auto fps = fixed_points(z_squared());
  REQUIRE(fps.size() == 3);
  CHECK(std::abs(fps[0].point.value()) < 1e-14);
  CHECK(fps[0].multiplier == 0.0);
  CHECK(std::abs(fps[1].point.value() - 1.0) < 1e-14);
  CHECK(fps[1].multiplier == doctest::Approx(2.0));
  CHECK(fps[2].point.is_infinity());
  CHECK(repelling_fixed_point(z_squared()) == fps[1].point);

  const auto crit = critical_points(z_squared());
  REQUIRE(crit.size() == 2);
  CHECK(std::abs(crit[0].point.value()) < 1e-14);
  CHECK(crit[1].point.is_infinity());

  const auto rc = critical_points(RationalMap::rational({1.0, 0.0, 1.0}, {0.0, 2.0, 0.0}));
  REQUIRE(rc.size() == 2);
  CHECK(std::abs(rc[0].point.value() + 1.0) < 1e-12);
  CHECK(std::abs(rc[1].point.value() - 1.0) < 1e-12);
}

TEST_CASE("monomial detection") {
  CHECK(z_squared().monomial_degree() == 2);
  CHECK_FALSE(basilica().monomial_degree().has_value());
}
