#pragma once

#include <span>
#include <vector>

#include "tcethermo/sphere.hpp"

namespace tce {

struct SolverOptions {
  double root_tolerance = 1e-12;  ///< chordal residual accepted after polishing
  double merge_radius = 1e-8;     ///< chordal radius under which roots coalesce
  int aberth_max_iter = 200;
};

/// Evaluates sum_k coeffs[k] z^k by Horner's rule, returning p(z) and p'(z).
struct PolyValue {
  Complex value;
  Complex derivative;
};
PolyValue horner(std::span<const Complex> coeffs, Complex z);

/// All roots of sum_k coeffs[k] z^k (leading coefficient nonzero) by
/// Aberth-Ehrlich simultaneous iteration. Returns deg(p) values; roots of
/// higher multiplicity appear repeated (clustered to the iteration's limit).
/// Sets converged=false if the correction did not settle within max_iter.
struct AberthResult {
  std::vector<Complex> roots;
  int iterations = 0;
  bool converged = true;
};
AberthResult aberth_roots(std::span<const Complex> coeffs, int max_iter = 200);

/// Strips leading coefficients whose magnitude is below rel_tol * max|c|.
std::span<const Complex> trim_leading(std::span<const Complex> coeffs, double rel_tol = 0.0);

}  // namespace tce
