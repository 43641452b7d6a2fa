#pragma once

#include <string>
#include <vector>

#include "tcethermo/numeric.hpp"
#include "tcethermo/orbits.hpp"
#include "tcethermo/pressure.hpp"
#include "tcethermo/transfer.hpp"

namespace tce {

enum class EnsembleSource { Periodic, Preimage, Birkhoff };
const char* source_name(EnsembleSource s);

/// Weighted orbit records at level n, column-oriented like PreimageTree.
/// Weights are normalized in the log domain; log_partition keeps the
/// normalizer so that restricted sums can be turned back into pressures.
struct EmpiricalEnsemble {
  EnsembleSource source = EnsembleSource::Preimage;
  int n = 0;
  std::vector<SpherePoint> points;
  std::vector<double> log_weights;
  double log_partition = 0.0;
  std::vector<std::string> observable_names;
  std::vector<std::vector<double>> sums;  ///< sums[j][i] = S_n(psi_j)(point i)

  std::size_t size() const { return points.size(); }
  const std::vector<double>& sum_of(const std::string& name) const;
};

/// Omega_n: Per_n weighted by exp(S_n phi). Throws EmptyPeriodicSet.
EmpiricalEnsemble periodic_ensemble(const RationalMap& map, const Observable& phi,
                                    const std::vector<Observable>& observables, const PeriodicSet& per);
/// Omega_n(x0): T^{-n}(x0) weighted by deg * exp(S_n phi).
EmpiricalEnsemble preimage_ensemble(const RationalMap& map, const Observable& phi,
                                    const std::vector<Observable>& observables, const SpherePoint& x0, int n,
                                    const TreeOptions& opts = {});
/// The empirical measures W_n of the atoms of mu, weighted by mu.
EmpiricalEnsemble birkhoff_ensemble(const RationalMap& map, const std::vector<Observable>& observables,
                                    const AtomicMeasure& mu, int n);

enum class ThresholdKind { Above, Below, AbsAbove, AtLeast };

/// Predicate on the average a = S_n(psi) / n: a > value, a < value,
/// |a| > value, or a >= value (with a relative slack of 1e-12, so that
/// integer counts landing exactly on the threshold are kept).
struct Threshold {
  ThresholdKind kind = ThresholdKind::Above;
  double value = 0.0;
  bool accepts(double average) const;
};

/// log of the ensemble mass satisfying the predicate (not divided by n).
ExtReal log_mass(const EmpiricalEnsemble& e, const std::string& observable, const Threshold& t);
/// log of the ensemble mass with lo <= a < hi.
ExtReal log_band_mass(const EmpiricalEnsemble& e, const std::string& observable, double lo, double hi);

/// (1/n) log of the mass satisfying the predicate; neg_inf() when empty.
ExtReal level1_tail(const EmpiricalEnsemble& e, const std::string& observable, const Threshold& t);

struct RateFunction {
  std::string observable;
  std::vector<double> s;
  std::vector<ExtReal> rate;  ///< pos_inf() where the curve cannot resolve the conjugate
  PressureCurve curve;

  /// inf of the rate over s' >= s on the grid (pos_inf() if none finite).
  ExtReal upper_infimum(double s) const;
  /// inf of the rate over s' <= s on the grid.
  ExtReal lower_infimum(double s) const;
  /// Grid point where the rate is smallest.
  double argmin() const;
  /// Smallest finite second difference.
  double min_second_difference() const;
};

/// I(s) = max over the curve's q of q s - (P(q) - P(0)). Values of s outside
/// the range of secant slopes of the curve are unresolved and reported as
/// pos_inf(). Throws NonConvexCurve if the curve's second differences drop
/// below -tolerance.
RateFunction rate_from_curve(const PressureCurve& curve, const std::vector<double>& s_grid,
                             const std::string& observable = "", double convexity_tolerance = 1e-3);

/// |S_n(psi_j) / n - center_j| < delta_j.
struct Constraint {
  std::string observable;
  double center = 0.0;
  double delta = 0.0;
};

/// (1/n) log of the weighted sum restricted to members satisfying every
/// constraint, undoing the normalization. Throws EmptySelection.
double entropy_local_pressure(const EmpiricalEnsemble& e, const std::vector<Constraint>& constraints);

struct WeakStarRow {
  int n = 0;
  EnsembleSource source = EnsembleSource::Preimage;
  std::vector<double> single_mass;  ///< per observable: mass of its own neighborhood
  double joint_mass = 0.0;          ///< mass of the intersection
};

/// For each ensemble, the mass of {|S_n(psi_j)/n - int psi_j d mu| < delta_j}
/// with the centers integrated against `mu`.
std::vector<WeakStarRow> weak_star_check(const std::vector<EmpiricalEnsemble>& ensembles,
                                         const RationalMap& map, const std::vector<Observable>& observables,
                                         const std::vector<double>& deltas, const AtomicMeasure& mu);

/// Largest drop in mass between consecutive rows (0 if nondecreasing).
double weak_star_max_drop(const std::vector<WeakStarRow>& rows, int column = -1);

}  // namespace tce
