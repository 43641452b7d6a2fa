#pragma once

#include <optional>
#include <vector>

#include "tcethermo/roots.hpp"
#include "tcethermo/sphere.hpp"

namespace tce {

/// A rational map T = N/D of degree d >= 2 on the Riemann sphere, stored as
/// a homogeneous pair: both coefficient lists (ascending powers) have length
/// d + 1. Polynomials keep a constant denominator and use an affine fast path.
class RationalMap {
 public:
  /// Polynomial with coefficients in ascending powers.
  static RationalMap polynomial(std::vector<Complex> coeffs);
  /// General rational map N/D; throws InvalidMap on degree < 2 or when N and
  /// D share a root (resultant of the normalized pair below 1e-10).
  static RationalMap rational(std::vector<Complex> numerator, std::vector<Complex> denominator);

  int degree() const { return degree_; }
  bool is_polynomial() const { return polynomial_; }
  const std::vector<Complex>& numerator() const { return num_; }
  const std::vector<Complex>& denominator() const { return den_; }

  /// d when the map is z -> a z^d, used by arc-based conformality checks.
  std::optional<int> monomial_degree() const;

  /// this o inner.
  RationalMap compose(const RationalMap& inner) const;

 private:
  RationalMap(std::vector<Complex> num, std::vector<Complex> den, bool polynomial);

  std::vector<Complex> num_;
  std::vector<Complex> den_;
  int degree_ = 0;
  bool polynomial_ = false;
};

enum class DerivativeKind { Spherical, Euclidean };

/// A point of T^{-1}(x) with its local degree.
struct Preimage {
  SpherePoint point;
  int multiplicity = 1;
};
using PreimageSet = std::vector<Preimage>;

SpherePoint eval(const RationalMap& map, const SpherePoint& z);

/// |T'(z)| in the spherical metric, |T'(z)|(1+|z|^2)/(1+|T(z)|^2) for finite
/// z, computed in whichever chart keeps |z| <= 1. Zero at critical points.
double sph_deriv_abs(const RationalMap& map, const SpherePoint& z);

/// Spherical by default; Euclidean |T'(z)| (infinite at poles and at infinity).
double deriv_abs(const RationalMap& map, const SpherePoint& z, DerivativeKind kind);

/// Complex derivative T'(z) for finite z with D(z) != 0.
Complex derivative(const RationalMap& map, Complex z);

/// All solutions of T(w) = x with multiplicities summing to deg T, sorted in
/// complex lexicographic order. Throws SolverDiverged if a polished root
/// misses the chordal residual tolerance.
PreimageSet preimages(const RationalMap& map, const SpherePoint& x, const SolverOptions& opts = {});

/// Fixed points with their spherical multipliers |T'(p)|.
struct FixedPoint {
  SpherePoint point;
  double multiplier = 0.0;
};
std::vector<FixedPoint> fixed_points(const RationalMap& map, const SolverOptions& opts = {});

/// The fixed point with the largest multiplier; for maps of degree >= 2 it
/// is repelling and therefore lies on the Julia set.
SpherePoint repelling_fixed_point(const RationalMap& map, const SolverOptions& opts = {});

/// Critical points (zeros of the spherical derivative), with multiplicity.
std::vector<Preimage> critical_points(const RationalMap& map, const SolverOptions& opts = {});

}  // namespace tce
