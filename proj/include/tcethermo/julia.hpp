#pragma once

#include <cstdint>
#include <vector>

#include "tcethermo/rational_map.hpp"

namespace tce {

/// Random backward orbit of the repelling fixed point. Each step picks an
/// inverse branch with probability proportional to its local degree; the
/// first 200 steps are discarded. Deterministic in `seed`.
std::vector<SpherePoint> julia_sample(const RationalMap& map, std::size_t count, std::uint64_t seed,
                                      const SolverOptions& opts = {});

/// A point cloud on the Julia set with fast chordal proximity queries.
class JuliaCloud {
 public:
  /// All points of T^{-k}(p), 0 <= k <= depth, for the repelling fixed point p.
  static JuliaCloud from_tree(const RationalMap& map, int depth, const SolverOptions& opts = {});
  static JuliaCloud from_points(std::vector<SpherePoint> points);
  /// Preimage tree of the repelling fixed point in which every branch is
  /// refined until its local scale 2 / |(T^k)'(y)| drops below resolution/stop_factor,
  /// so that J is covered at that resolution even near weakly repelling
  /// points. Expansion is breadth-first and stops at max_points; resolved()
  /// reports whether every branch reached the target scale.
  static JuliaCloud adaptive(const RationalMap& map, double resolution = 1e-4, std::size_t max_points = 1u << 23,
                             double stop_factor = 8.0, const SolverOptions& opts = {});

  bool resolved() const { return resolved_; }

  const std::vector<SpherePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  /// Chordal distance to the nearest cloud point, or +inf if it exceeds
  /// max_radius.
  double nearest_distance(const SpherePoint& z, double max_radius) const;
  bool near(const SpherePoint& z, double delta) const { return nearest_distance(z, delta) < delta; }

 private:
  explicit JuliaCloud(std::vector<SpherePoint> points);

  using Key = std::uint64_t;
  Key key_of(long ix, long iy, long iz) const;

  std::vector<SpherePoint> points_;
  std::vector<Key> cell_keys_;             // sorted, unique
  std::vector<std::uint32_t> cell_start_;  // offsets into order_, one past the end included
  std::vector<std::uint32_t> order_;       // point indices grouped by cell
  double cell_ = 1e-3;
  bool resolved_ = true;
};

}  // namespace tce
