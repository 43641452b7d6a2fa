#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tcethermo/errors.hpp"
#include "tcethermo/pressure.hpp"

using namespace tce;

namespace {
RationalMap z_squared() { return RationalMap::polynomial({0.0, 0.0, 1.0}); }
RationalMap basilica() { return RationalMap::polynomial({-1.0, 0.0, 1.0}); }
const double kLog2 = std::log(2.0);
const Observable kZero = Observable::constant(0.0);
const Observable kOne = Observable::constant(1.0);
const Observable kGeo = Observable::neg_t_log_deriv(1.0);
const Observable kRe = Observable::re_poly({0.0, 1.0});
const Observable kIm = Observable::im_poly({0.0, 1.0});
}  // namespace

TEST_CASE("apply_Ln_at closed forms") {
  const RationalMap t = z_squared();
  const SignedLog a = apply_Ln_at(t, kZero, kOne, SpherePoint(1.0), 5);
  CHECK(a.sign == 1);
  CHECK(a.log_abs == doctest::Approx(std::log(32.0)).epsilon(1e-15));
  for (int n : {1, 4, 9}) {
    const SignedLog b = apply_Ln_at(t, Observable::constant(0.35), kOne, SpherePoint(Complex(0.0, 1.0)), n);
    CHECK(b.log_abs == doctest::Approx(n * (kLog2 + 0.35)).epsilon(1e-14));
  }
  for (int n : {3, 8, 12}) {
    const SignedLog c = apply_Ln_at(t, kGeo, kOne, SpherePoint(std::polar(1.0, 0.4)), n);
    CHECK(std::abs(c.log_abs) < 1e-8);
  }
  // signed psi: the real parts of the 2^n preimages of 1 cancel
  const SignedLog d = apply_Ln_at(t, kZero, kRe, SpherePoint(1.0), 6);
  CHECK(std::abs(d.to_double()) < 1e-12);
  const SignedLog e = apply_Ln_at(t, kZero, Observable::constant(-2.0), SpherePoint(1.0), 3);
  CHECK(e.sign == -1);
  CHECK(e.to_double() == doctest::Approx(-16.0));
}

TEST_CASE("cesaro density closed forms") {
  const RationalMap t = z_squared();
  for (int k = 0; k < 8; ++k) {
    const SpherePoint x(std::polar(1.0, 0.77 * k));
    CHECK(cesaro_h(t, kZero, x, 9, kLog2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cesaro_h(t, Observable::constant(-0.4), x, 7, kLog2 - 0.4) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(cesaro_h(basilica(), kRe, SpherePoint(0.3), 1, 5.0) == 1.0);
}

TEST_CASE("log eigenvalue converges faster than the tree average") {
  const RationalMap t = z_squared();
  const Observable phi = Observable::linear_combination({{0.3, kRe}});
  const double a = log_eigenvalue(t, phi, SpherePoint(1.0), 14);
  const double b = log_eigenvalue(t, phi, SpherePoint(1.0), 16);
  CHECK(std::abs(a - b) < 1e-11);
  CHECK(std::abs(pressure_tree(t, phi, SpherePoint(1.0), 16).value - b) > 1e-4);
}

TEST_CASE("conformal atoms of z^2") {
  const RationalMap t = z_squared();
  const AtomicMeasure eta = conformal_atoms(t, kZero, SpherePoint(1.0), 12);
  REQUIRE(eta.size() == 4096);
  CHECK(std::abs(eta.total() - 1.0) < 1e-12);
  for (double w : eta.weights) CHECK(w == doctest::Approx(1.0 / 4096).epsilon(1e-12));
  const double m_re = eta.integrate(t, kRe);
  const double m_im = eta.integrate(t, kIm);
  CHECK(std::hypot(m_re, m_im) < 1e-10);

  const double tol = 2.0 / std::sqrt(4096.0);
  CHECK(std::abs(conformality_ratio(t, eta, kZero, kLog2, 0.0, 0.5) - 1.0) < tol);
  CHECK(std::abs(conformality_ratio(t, eta, kZero, kLog2, 0.1, 0.37) - 1.0) < tol);
  CHECK_THROWS_AS(conformality_ratio(t, eta, kZero, kLog2, 0.0, 0.7), InvalidArgument);
  CHECK_THROWS_AS(conformality_ratio(basilica(), eta, kZero, kLog2, 0.0, 0.5), InvalidArgument);

  const AtomicMeasure shifted = conformal_atoms(t, Observable::constant(2.5), SpherePoint(1.0), 12);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    CHECK(shifted.atoms[i] == eta.atoms[i]);
    CHECK(shifted.weights[i] == doctest::Approx(eta.weights[i]).epsilon(1e-12));
  }
}

TEST_CASE("dual identity at the atomic level") {
  for (const RationalMap& t : {z_squared(), basilica()}) {
    const Observable phi = Observable::linear_combination({{0.3, kRe}});
    const SpherePoint x0 = repelling_fixed_point(t);
    const double logP = log_eigenvalue(t, phi, x0, 18);
    const AtomicMeasure eta = conformal_atoms(t, phi, x0, 12);
    const double tol = 2.0 / std::sqrt(static_cast<double>(eta.size()));
    for (const Observable& g : {kOne, kRe, kIm}) {
      const DualPair d = dual_identity(t, eta, phi, g, logP);
      CHECK(std::abs(d.transfer_side - d.eigen_side) < tol);
    }
  }
}

TEST_CASE("equilibrium atoms") {
  const RationalMap t = z_squared();
  const AtomicMeasure mu = equilibrium_atoms(t, kZero, SpherePoint(1.0), 10, kLog2);
  const AtomicMeasure eta = conformal_atoms(t, kZero, SpherePoint(1.0), 10);
  REQUIRE(mu.size() == eta.size());
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(mu.weights[i] == doctest::Approx(eta.weights[i]).epsilon(1e-12));
  CHECK(std::abs(mu.total() - 1.0) < 1e-12);

  const AtomicMeasure geo = equilibrium_atoms(t, kGeo, SpherePoint(1.0), 10, 0.0);
  for (double w : geo.weights) CHECK(w == doctest::Approx(1.0 / 1024).epsilon(1e-9));

  const AtomicMeasure deep = equilibrium_atoms(t, kZero, SpherePoint(1.0), 14, kLog2);
  for (const Observable& g : {kRe, kIm, Observable::re_poly({0.0, 0.0, 1.0})}) {
    CHECK(std::abs(deep.integrate_pushforward(t, g) - deep.integrate(t, g)) < 5e-3);
  }
}

TEST_CASE("rpf residuals") {
  const RationalMap t = z_squared();
  const auto sample = julia_sample(t, 8, 3);
  RpfOptions o;
  o.cesaro_depth = 6;
  const RpfResiduals r = rpf_residuals(t, kZero, sample, 10, kLog2, o);
  CHECK(r.eigen_residual < 1e-8);
  CHECK(std::abs(r.c0_bound - 1.0) < 1e-8);
  CHECK(r.invariance_residual < 1e-8);

  const Observable phi = Observable::linear_combination({{0.3, kRe}});
  const Observable shifted = Observable::linear_combination({{0.3, kRe}, {1.0, Observable::constant(0.8)}});
  const double lp = log_eigenvalue(t, phi, SpherePoint(1.0), 16);
  const RpfResiduals a = rpf_residuals(t, phi, sample, 10, lp, o);
  const RpfResiduals b = rpf_residuals(t, shifted, sample, 10, lp + 0.8, o);
  CHECK(a.eigen_residual == doctest::Approx(b.eigen_residual).epsilon(1e-9));
  CHECK(a.c0_bound == doctest::Approx(b.c0_bound).epsilon(1e-12));
  CHECK(a.invariance_residual == doctest::Approx(b.invariance_residual).epsilon(1e-6));
  CHECK(a.density.ratio_bound <= a.c0_bound * a.c0_bound);
  for (double v : a.density.values) CHECK(v > 0.0);
}

TEST_CASE("c0 bound is stable in n for z^2 - 1") {
  const RationalMap t = basilica();
  const auto sample = julia_sample(t, 8, 4);
  double lo = INFINITY, hi = 0.0;
  for (int n = 8; n <= 12; ++n) {
    const double c = c0_bound(t, kZero, sample, n);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(hi / lo < 1.1);
}
