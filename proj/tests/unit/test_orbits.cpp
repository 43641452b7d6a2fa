#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "tcethermo/errors.hpp"
#include "tcethermo/orbits.hpp"

using namespace tce;

namespace {
RationalMap z_squared() { return RationalMap::polynomial({0.0, 0.0, 1.0}); }
RationalMap basilica() { return RationalMap::polynomial({-1.0, 0.0, 1.0}); }
const double kLog2 = std::log(2.0);
const double kTwoPi = 2.0 * std::numbers::pi;

void check_fiber(const RationalMap& t, const PreimageTree& tree) {
  for (const SpherePoint& y : tree.leaves) {
    SpherePoint z = y;
    for (int k = 0; k < tree.depth; ++k) z = eval(t, z);
    REQUIRE(chordal(z, tree.root) < tree.depth * 1e-10);
  }
}
}  // namespace

TEST_CASE("preimage tree of z^2") {
  const RationalMap t = z_squared();
  const PreimageTree a = preimage_tree(t, Observable::constant(0.0), {}, SpherePoint(1.0), 5);
  CHECK(a.size() == 32);
  CHECK(a.total_multiplicity() == 32);
  for (double w : a.weight_log) CHECK(w == 0.0);
  check_fiber(t, a);

  const PreimageTree b = preimage_tree(t, Observable::constant(0.0), {}, SpherePoint(1.0), 3);
  REQUIRE(b.size() == 8);
  for (const SpherePoint& y : b.leaves) {
    CHECK(std::abs(std::pow(y.value(), 8) - 1.0) < 1e-13);
    CHECK(std::abs(std::abs(y.value()) - 1.0) < 1e-15);
  }
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) CHECK(chordal(b.leaves[i], b.leaves[j]) > 0.5);

  const PreimageTree c = preimage_tree(t, Observable::neg_t_log_deriv(1.0), {}, SpherePoint(1.0), 4);
  for (double w : c.weight_log) CHECK(std::abs(w + 4 * kLog2) < 1e-8);
}

TEST_CASE("tree multiplicities through a critical value") {
  const RationalMap t = z_squared();
  const PreimageTree tree = preimage_tree(t, Observable::constant(0.0), {}, SpherePoint(0.0), 3);
  CHECK(tree.size() == 1);
  CHECK(tree.total_multiplicity() == 8);
  CHECK(tree.log_weight(0) == doctest::Approx(std::log(8.0)));
}

TEST_CASE("tree fiber consistency for z^2 - 1 and budget") {
  const RationalMap t = basilica();
  const SpherePoint x0 = repelling_fixed_point(t);
  const Observable re = Observable::re_poly({0.0, 1.0}).with_name("re");
  const PreimageTree tree = preimage_tree(t, Observable::constant(0.0), {re}, x0, 12);
  CHECK(tree.size() == 4096);
  check_fiber(t, tree);
  // the sums are exact Birkhoff sums along the forward orbit
  for (std::size_t i = 0; i < tree.size(); i += 97) {
    CHECK(std::abs(tree.sum_of("re")[i] - birkhoff_sum(t, re, tree.leaves[i], 12)) < 1e-9);
  }
  TreeOptions small;
  small.atom_budget = 1000;
  CHECK_THROWS_AS(preimage_tree(t, Observable::constant(0.0), {}, x0, 10, small), DepthTooLarge);
  CHECK_THROWS_AS(tree.sum_of("im"), UnknownObservable);
}

TEST_CASE("fiber masses") {
  const auto m = fiber_log_masses(z_squared(), Observable::constant(0.25), SpherePoint(1.0), 6);
  REQUIRE(m.size() == 7);
  for (int k = 0; k <= 6; ++k) CHECK(m[k] == doctest::Approx(k * (kLog2 + 0.25)).epsilon(1e-14));
}

TEST_CASE("tree cache round trip") {
  const RationalMap t = basilica();
  const Observable re = Observable::re_poly({0.0, 1.0}).with_name("re");
  const PreimageTree tree = preimage_tree(t, Observable::constant(0.1), {re}, SpherePoint(2.0), 6);
  const std::string path = "tree_cache_roundtrip.bin";
  write_tree_cache(tree, path);
  const PreimageTree back = read_tree_cache(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    CHECK(back.leaves[i] == tree.leaves[i]);
    CHECK(back.weight_log[i] == tree.weight_log[i]);
    CHECK(back.sums[0][i] == tree.sums[0][i]);
  }
  CHECK_THROWS_AS(read_tree_cache("does_not_exist.bin"), IoError);
}

TEST_CASE("periodic points of z^2") {
  const RationalMap t = z_squared();
  const JuliaCloud cloud = JuliaCloud::adaptive(t);
  const PeriodicSet p1 = periodic_points(t, 1, cloud);
  REQUIRE(p1.points.size() == 1);
  CHECK(std::abs(p1.points[0].point.value() - 1.0) < 1e-15);

  const PeriodicSet p3 = periodic_points(t, 3, cloud);
  REQUIRE(p3.points.size() == 7);
  for (const PeriodicPoint& p : p3.points) CHECK(std::abs(std::pow(p.point.value(), 7) - 1.0) < 1e-12);

  for (int n = 2; n <= 14; ++n) {
    const PeriodicSet pn = periodic_points(t, n, cloud);
    CHECK(pn.points.size() == (std::size_t{1} << n) - 1);
    for (const PeriodicPoint& p : pn.points) {
      SpherePoint z = p.point;
      for (int k = 0; k < n; ++k) z = eval(t, z);
      CHECK(chordal(z, p.point) < 1e-10);
      CHECK(p.multiplier == doctest::Approx(std::pow(2.0, n)).epsilon(1e-9));
    }
  }
}

TEST_CASE("periodic points of z^2 - 1 exclude the attracting cycle") {
  const RationalMap t = basilica();
  const JuliaCloud cloud = JuliaCloud::adaptive(t);
  const PeriodicSet p2 = periodic_points(t, 2, cloud);
  // period-2 points in C: two fixed points and the 2-cycle {0, -1}
  CHECK(p2.points.size() == 2);
  for (const PeriodicPoint& p : p2.points) CHECK(p.multiplier > 1.0);
  const PeriodicSet p8 = periodic_points(t, 8, cloud);
  CHECK(p8.points.size() == 256 - 2);
}

TEST_CASE("separated sets") {
  const RationalMap t = z_squared();
  CHECK(separated_set({SpherePoint(1.0), SpherePoint(1.0)}, t, 3, 0.1).size() == 1);
  CHECK(separated_set({SpherePoint(Complex(0.0, 1.0))}, t, 3, 0.1).size() == 1);

  std::vector<SpherePoint> roots;
  for (int k = 0; k < 1024; ++k) roots.emplace_back(std::polar(1.0, kTwoPi * k / 1024));
  std::size_t prev_n = 0;
  for (int n = 1; n <= 8; ++n) {
    const std::size_t c = separated_set(roots, t, n, 0.1).size();
    CHECK(c >= prev_n);
    prev_n = c;
    std::size_t prev_eps = roots.size() + 1;
    for (double eps : {0.05, 0.1, 0.2, 0.4}) {
      const auto kept = separated_set(roots, t, n, eps);
      CHECK(kept.size() <= prev_eps);
      prev_eps = kept.size();
      // maximality: every point is within eps of a kept point in the Bowen metric
      for (std::size_t i = 0; i < roots.size(); i += 37) {
        bool covered = false;
        for (const SpherePoint& k : kept) {
          double d = 0.0;
          SpherePoint a = roots[i], b = k;
          for (int j = 0; j < n; ++j) {
            d = std::max(d, chordal(a, b));
            a = eval(t, a);
            b = eval(t, b);
          }
          if (d <= eps) covered = true;
        }
        CHECK(covered);
      }
    }
  }
  // growth like c 2^n once the grid resolves the Bowen balls
  const double r6 = static_cast<double>(separated_set(roots, t, 6, 0.1).size());
  const double r5 = static_cast<double>(separated_set(roots, t, 5, 0.1).size());
  CHECK(r6 / r5 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("bowen cloud agrees with the brute force selection") {
  const RationalMap t = basilica();
  const BowenCloud cloud(t, repelling_fixed_point(t), 9);
  std::vector<SpherePoint> leaves;
  for (std::size_t i = 0; i < cloud.leaf_count(); ++i) leaves.push_back(cloud.leaf(i));
  for (int n : {1, 3, 6}) {
    for (double eps : {0.05, 0.3, 1.2}) {
      const auto fast = cloud.separated(n, eps);
      const auto slow = separated_set(leaves, t, n, eps);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t k = 0; k < fast.size(); ++k) CHECK(cloud.leaf(fast[k]) == slow[k]);
    }
  }
  const Observable re = Observable::re_poly({0.0, 1.0});
  CHECK(std::abs(cloud.birkhoff(t, re, 17, 7) - birkhoff_sum(t, re, cloud.leaf(17), 7)) < 1e-9);
  CHECK(chordal(cloud.iterate(17, 3), eval(t, eval(t, eval(t, cloud.leaf(17))))) < 1e-12);
}

TEST_CASE("separated counts grow by the degree") {
  const RationalMap t = z_squared();
  const BowenCloud cloud(t, SpherePoint(std::polar(1.0, kTwoPi / 3.0)), 16);
  const double n10 = static_cast<double>(cloud.separated(10, 0.05).size());
  const double n11 = static_cast<double>(cloud.separated(11, 0.05).size());
  CHECK(n11 / n10 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("esc diagnostic") {
  const RationalMap t = z_squared();
  const JuliaCloud circle = JuliaCloud::from_tree(t, 14);
  const EscReport r = esc_diagnostic(t, SpherePoint(1.0), 0.2, 10, 16, circle);
  CHECK(r.rate == doctest::Approx(2.0).epsilon(0.15));
  for (std::size_t k = 1; k < r.diameters.size(); ++k) CHECK(r.diameters[k] <= 1.1 * r.diameters[k - 1]);

  const EscReport one = esc_diagnostic(t, SpherePoint(1.0), 0.2, 1, 8, circle);
  CHECK(one.diameters.size() == 2);
  for (double d : one.diameters) CHECK(d <= 0.4);

  const RationalMap b = basilica();
  const JuliaCloud bcloud = JuliaCloud::from_tree(b, 14);
  const EscReport rb = esc_diagnostic(b, repelling_fixed_point(b), 0.1, 10, 16, bcloud);
  CHECK(rb.rate > 1.0);
}
