#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <compare>

namespace tce {

using Complex = std::complex<double>;

/// A point of the Riemann sphere: a finite complex value or infinity.
class SpherePoint {
 public:
  constexpr SpherePoint() = default;
  constexpr SpherePoint(Complex z) : z_(z) {}  // NOLINT: implicit by design of the API
  constexpr SpherePoint(double re, double im = 0.0) : z_(re, im) {}

  static constexpr SpherePoint infinity() {
    SpherePoint p;
    p.inf_ = true;
    return p;
  }

  constexpr bool is_infinity() const { return inf_; }
  constexpr Complex value() const { return z_; }

  /// Unit-sphere coordinates under inverse stereographic projection; the
  /// Euclidean distance between embeddings is the chordal distance.
  std::array<double, 3> embed() const {
    if (inf_) return {0.0, 0.0, 1.0};
    const double r2 = std::norm(z_);
    const double s = 1.0 / (1.0 + r2);
    return {2.0 * z_.real() * s, 2.0 * z_.imag() * s, (r2 - 1.0) * s};
  }

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.z_ == b.z_;
  }

 private:
  Complex z_{0.0, 0.0};
  bool inf_ = false;
};

/// Chordal distance on the sphere; at most 2.
inline double chordal(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinity() && b.is_infinity()) return 0.0;
  if (a.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(b.value()));
  if (b.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(a.value()));
  const Complex z = a.value();
  const Complex w = b.value();
  return 2.0 * std::abs(z - w) / std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
}

inline double embedded_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Complex lexicographic order (real part, then imaginary part), infinity last.
inline bool lex_less(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinity() != b.is_infinity()) return b.is_infinity();
  if (a.is_infinity()) return false;
  if (a.value().real() != b.value().real()) return a.value().real() < b.value().real();
  return a.value().imag() < b.value().imag();
}

}  // namespace tce
