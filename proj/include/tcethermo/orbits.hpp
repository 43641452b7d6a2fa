#pragma once

#include <vector>

#include "tcethermo/julia.hpp"
#include "tcethermo/tree.hpp"

namespace tce {

struct PeriodicPoint {
  SpherePoint point;
  double multiplier = 0.0;  ///< |(T^n)'(p)| in the spherical metric
};

struct PeriodicSet {
  int period = 0;
  std::vector<PeriodicPoint> points;
  std::size_t candidates = 0;        ///< distinct roots before the Julia filters
  double residual_tolerance = 0.0;   ///< bound actually enforced on |T^n p - p|
};

struct PeriodicOptions {
  TreeOptions tree;
  double dedup_radius = 1e-8;
  double min_multiplier = 1.0 - 1e-6;
  double julia_delta = 1e-4;
  int newton_max_iter = 60;
  /// Newton starts are the leaves of T^{-(n+k)}(p) with k = oversample
  /// (reduced as needed to stay inside the atom budget): the leaves at
  /// depth n alone sit outside the Newton basins of some periodic points.
  int oversample = 3;
};

/// Per_n inside J, from Newton polish of the leaves of T^{-n-k}(p) for the
/// repelling fixed point p. `cloud` supplies the Julia proximity filter.
PeriodicSet periodic_points(const RationalMap& map, int n, const JuliaCloud& cloud,
                            const PeriodicOptions& opts = {});

/// Greedy maximal (n, eps)-separated subset under the Bowen metric, in input
/// order. Brute force over precomputed forward orbits.
std::vector<SpherePoint> separated_set(const std::vector<SpherePoint>& points, const RationalMap& map, int n,
                                       double eps);

/// Leaves of T^{-m}(x0) with the whole tree kept, so that the forward orbit
/// of a leaf is its chain of ancestors. Supports greedy separated-set
/// selection at scale.
class BowenCloud {
 public:
  BowenCloud(const RationalMap& map, const SpherePoint& x0, int depth, const TreeOptions& opts = {});

  int depth() const { return depth_; }
  std::size_t leaf_count() const { return levels_.back().size(); }
  SpherePoint leaf(std::size_t i) const { return levels_.back()[i]; }
  /// T^j of leaf i, for 0 <= j <= depth.
  SpherePoint iterate(std::size_t leaf, int j) const;

  /// Indices of leaves retained by the greedy (n, eps) selection in leaf order.
  std::vector<std::size_t> separated(int n, double eps) const;

  /// S_n(obs) of leaf i, summed over its ancestors (n <= depth).
  double birkhoff(const RationalMap& map, const Observable& obs, std::size_t leaf, int n) const;

 private:
  std::size_t ancestor(std::size_t leaf, int j) const;

  int depth_;
  std::vector<std::vector<SpherePoint>> levels_;      // levels_[k] = nodes at depth k
  std::vector<std::vector<std::uint32_t>> parent_;    // parent_[k][i] index in level k-1
  std::vector<std::vector<std::uint32_t>> first_child_;  // child range start in level k+1 (size+1 entries)
};

struct EscReport {
  double radius = 0.0;
  std::vector<double> diameters;  ///< index k = pullback depth k (0 = the probe set itself)
  double rate = 0.0;              ///< fitted shrink rate lambda-hat
  std::size_t probes = 0;
};

/// Pulls `probes` Julia points from B(x, r0) back along every inverse branch
/// to depth n_max by continuation, records the largest same-branch diameter
/// per depth, and fits log diameter against depth.
EscReport esc_diagnostic(const RationalMap& map, const SpherePoint& x, double r0, int n_max, int probes,
                         const JuliaCloud& cloud, const TreeOptions& opts = {});

}  // namespace tce
