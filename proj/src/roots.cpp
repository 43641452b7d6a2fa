#include "tcethermo/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tce {

PolyValue horner(std::span<const Complex> coeffs, Complex z) {
  Complex p{0.0, 0.0};
  Complex dp{0.0, 0.0};
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + coeffs[k];
  }
  return {p, dp};
}

std::span<const Complex> trim_leading(std::span<const Complex> coeffs, double rel_tol) {
  double scale = 0.0;
  for (const Complex& c : coeffs) scale = std::max(scale, std::abs(c));
  std::size_t n = coeffs.size();
  while (n > 0 && std::abs(coeffs[n - 1]) <= rel_tol * scale) --n;
  return coeffs.first(n);
}

AberthResult aberth_roots(std::span<const Complex> coeffs, int max_iter) {
  AberthResult out;
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree <= 0) return out;
  const Complex lead = coeffs.back();
  if (degree == 1) {
    out.roots.push_back(-coeffs[0] / lead);
    return out;
  }

  // Initial guesses on a circle whose radius is the geometric mean of the
  // root moduli (or the Cauchy bound when the constant term vanishes).
  double radius = std::pow(std::abs(coeffs[0] / lead), 1.0 / degree);
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    double bound = 0.0;
    for (int k = 0; k < degree; ++k) bound = std::max(bound, std::abs(coeffs[k] / lead));
    radius = 1.0 + bound;
  }
  out.roots.resize(degree);
  for (int k = 0; k < degree; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / degree + 0.4;
    out.roots[k] = std::polar(radius, angle);
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<bool> done(degree, false);
  out.converged = false;
  for (int iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    bool all_done = true;
    for (int k = 0; k < degree; ++k) {
      if (done[k]) continue;
      const Complex z = out.roots[k];
      const PolyValue pv = horner(coeffs, z);
      if (pv.value == Complex{0.0, 0.0}) {
        done[k] = true;
        continue;
      }
      Complex repulsion{0.0, 0.0};
      for (int j = 0; j < degree; ++j) {
        if (j != k) repulsion += 1.0 / (z - out.roots[j]);
      }
      const Complex ratio = pv.value / pv.derivative;
      Complex step = ratio / (1.0 - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        // p'(z) vanished; nudge off the critical point.
        step = Complex{1e-3 * (1.0 + std::abs(z)), 0.0};
      }
      out.roots[k] = z - step;
      if (std::abs(step) <= 4.0 * eps * (1.0 + std::abs(out.roots[k]))) {
        done[k] = true;
      } else {
        all_done = false;
      }
    }
    if (all_done) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    out.converged = std::all_of(done.begin(), done.end(), [](bool b) { return b; });
  }
  return out;
}

}  // namespace tce
