#pragma once

#include <vector>

#include "tcethermo/numeric.hpp"
#include "tcethermo/observable.hpp"
#include "tcethermo/tree.hpp"

namespace tce {

/// Finitely supported measure on the sphere.
struct AtomicMeasure {
  std::vector<SpherePoint> atoms;
  std::vector<double> weights;
  bool normalized = false;

  std::size_t size() const { return atoms.size(); }
  double total() const;
  /// Rescales the weights to sum to one.
  void normalize();
  /// sum_i w_i f(a_i).
  double integrate(const RationalMap& map, const Observable& f) const;
  /// sum_i w_i f(T a_i).
  double integrate_pushforward(const RationalMap& map, const Observable& f) const;
};

/// log of L_phi^n(psi)(x) = sum over T^{-n}(x) of deg * exp(S_n phi) * psi,
/// with sign; psi of either sign is split into positive and negative parts.
SignedLog apply_Ln_at(const RationalMap& map, const Observable& phi, const Observable& psi, const SpherePoint& x,
                      int n, const TreeOptions& opts = {});

/// log L_phi^n 1(x0) - log L_phi^{n-1} 1(x0): the leading eigenvalue
/// estimate, which converges geometrically where (1/n) log L^n 1 carries an
/// O(1/n) offset.
double log_eigenvalue(const RationalMap& map, const Observable& phi, const SpherePoint& x0, int n,
                      const TreeOptions& opts = {});

/// (1/n) sum_{k<n} exp(-k logP) L_phi^k 1(x).
double cesaro_h(const RationalMap& map, const Observable& phi, const SpherePoint& x, int n, double logP,
                const TreeOptions& opts = {});

/// Atoms on T^{-n}(x0) weighted by deg * exp(S_n phi), normalized.
AtomicMeasure conformal_atoms(const RationalMap& map, const Observable& phi, const SpherePoint& x0, int n,
                              const TreeOptions& opts = {});

/// Conformal atoms reweighted by the Cesaro density of depth m
/// (m < 0 selects n / 2), normalized.
AtomicMeasure equilibrium_atoms(const RationalMap& map, const Observable& phi, const SpherePoint& x0, int n,
                                double logP, int m = -1, const TreeOptions& opts = {});

/// eta(T(E)) / int_E exp(logP - phi) d eta for the arc E of arguments
/// [start, end) turns. Only for monomials a z^d, on arcs of length <= 1/d
/// where T is injective.
double conformality_ratio(const RationalMap& map, const AtomicMeasure& eta, const Observable& phi, double logP,
                          double start, double end);

/// (int L_phi g d eta, exp(logP) int g d eta).
struct DualPair {
  double transfer_side = 0.0;
  double eigen_side = 0.0;
};
DualPair dual_identity(const RationalMap& map, const AtomicMeasure& eta, const Observable& phi, const Observable& g,
                       double logP, const SolverOptions& opts = {});

struct DensityProfile {
  std::vector<SpherePoint> points;
  std::vector<double> values;
  double log_lambda = 0.0;
  double ratio_bound = 0.0;  ///< max / min of the values
};

struct RpfResiduals {
  double eigen_residual = 0.0;
  double c0_bound = 0.0;
  double invariance_residual = 0.0;
  DensityProfile density;
};

struct RpfOptions {
  int cesaro_depth = -1;  ///< m for h; negative selects n / 2
  int equilibrium_depth = -1;  ///< atom depth for the invariance check; negative selects n
  TreeOptions tree;
};

/// eigen_residual = max over the sample of |exp(-logP) L_phi h - h| / h;
/// c0_bound = max / min over the sample of exp(-n logP) L_phi^n 1;
/// invariance_residual = max over g in {Re z, Im z, Re z^2} of
/// |int g o T d mu - int g d mu| for equilibrium atoms rooted at sample[0].
RpfResiduals rpf_residuals(const RationalMap& map, const Observable& phi, const std::vector<SpherePoint>& sample,
                           int n, double logP, const RpfOptions& opts = {});

/// max / min over the sample of exp(-n logP) L_phi^n 1; independent of logP.
double c0_bound(const RationalMap& map, const Observable& phi, const std::vector<SpherePoint>& sample, int n,
                const TreeOptions& opts = {});

}  // namespace tce
