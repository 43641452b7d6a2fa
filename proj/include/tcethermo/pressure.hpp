#pragma once

#include <string>
#include <vector>

#include "tcethermo/orbits.hpp"
#include "tcethermo/transfer.hpp"

namespace tce {

enum class PressureMethod { Tree, Periodic, Birkhoff, Separated };
const char* method_name(PressureMethod m);

struct PressureEstimate {
  double value = 0.0;
  PressureMethod method = PressureMethod::Tree;
  int depth = 0;
  std::size_t support = 0;  ///< atoms, periodic points or separated points used
};

/// (1/n) log L_phi^n 1(x0).
PressureEstimate pressure_tree(const RationalMap& map, const Observable& phi, const SpherePoint& x0, int n,
                               const TreeOptions& opts = {});

/// (1/n) log sum over Per_n of exp(S_n phi). Throws EmptyPeriodicSet.
PressureEstimate pressure_periodic(const RationalMap& map, const Observable& phi, const PeriodicSet& per);
PressureEstimate pressure_periodic(const RationalMap& map, const Observable& phi, int n, const JuliaCloud& cloud,
                                   const PeriodicOptions& opts = {});

/// (1/n) log int exp(S_n psi) d mu, which estimates P(phi + psi) - P(phi)
/// when mu approximates the equilibrium state of phi.
PressureEstimate pressure_birkhoff(const RationalMap& map, const Observable& psi, const AtomicMeasure& mu, int n);

/// (1/n) log sum over a greedy (n, eps)-separated subset of exp(S_n phi).
PressureEstimate pressure_separated(const RationalMap& map, const Observable& phi,
                                   const std::vector<SpherePoint>& cloud, double eps, int n);
PressureEstimate pressure_separated(const RationalMap& map, const Observable& phi, const BowenCloud& cloud,
                                   double eps, int n);

struct PressureCurve {
  std::vector<double> q;
  std::vector<double> pressure;
  PressureMethod method = PressureMethod::Tree;
  int depth = 0;

  /// Smallest second difference normalized by the grid spacing squared times
  /// the spacing, i.e. the raw second difference for uniform grids.
  double min_second_difference() const;
  double at_zero() const;  ///< P at q = 0; throws if 0 is not on the grid
};

/// q -> P(phi + q psi) from one enumeration reused for every q.
PressureCurve pressure_curve_tree(const RationalMap& map, const Observable& phi, const Observable& psi,
                                  const std::vector<double>& q_grid, const SpherePoint& x0, int n,
                                  const TreeOptions& opts = {});
PressureCurve pressure_curve_periodic(const RationalMap& map, const Observable& phi, const Observable& psi,
                                      const std::vector<double>& q_grid, const PeriodicSet& per);

}  // namespace tce
