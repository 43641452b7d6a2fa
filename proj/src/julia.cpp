#include "tcethermo/julia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tce {

std::vector<SpherePoint> julia_sample(const RationalMap& map, std::size_t count, std::uint64_t seed,
                                      const SolverOptions& opts) {
  constexpr int kBurnIn = 200;
  std::mt19937_64 rng(seed);
  SpherePoint z = repelling_fixed_point(map, opts);
  std::vector<SpherePoint> out;
  out.reserve(count);
  const auto step = [&] {
    const PreimageSet fiber = preimages(map, z, opts);
    int pick = static_cast<int>(rng() % static_cast<std::uint64_t>(map.degree()));
    for (const Preimage& y : fiber) {
      if (pick < y.multiplicity) {
        z = y.point;
        return;
      }
      pick -= y.multiplicity;
    }
  };
  for (int i = 0; i < kBurnIn; ++i) step();
  while (out.size() < count) {
    step();
    out.push_back(z);
  }
  return out;
}

JuliaCloud JuliaCloud::from_tree(const RationalMap& map, int depth, const SolverOptions& opts) {
  std::vector<SpherePoint> all{repelling_fixed_point(map, opts)};
  std::vector<SpherePoint> level = all;
  for (int k = 0; k < depth; ++k) {
    std::vector<SpherePoint> next;
    next.reserve(level.size() * map.degree());
    for (const SpherePoint& x : level) {
      for (const Preimage& y : preimages(map, x, opts)) next.push_back(y.point);
    }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return JuliaCloud(std::move(all));
}

JuliaCloud JuliaCloud::adaptive(const RationalMap& map, double resolution, std::size_t max_points,
                                 double stop_factor, const SolverOptions& opts) {
  struct Node {
    SpherePoint point;
    double log_deriv;
  };
  const double stop = std::log(2.0 * stop_factor / resolution);
  std::vector<SpherePoint> all;
  std::vector<Node> level{{repelling_fixed_point(map, opts), 0.0}};
  constexpr int kMaxDepth = 200;
  bool resolved = true;
  for (int depth = 0; !level.empty(); ++depth) {
    if (all.size() + level.size() > max_points || depth > kMaxDepth) {
      resolved = false;
      break;
    }
    std::vector<Node> next;
    for (const Node& node : level) {
      all.push_back(node.point);
      if (node.log_deriv >= stop) continue;
      for (const Preimage& y : preimages(map, node.point, opts)) {
        const double d = sph_deriv_abs(map, y.point);
        // a critical point on the branch: the scale estimate is useless, so
        // keep refining until the caps bite
        const double ld = d > 0.0 ? node.log_deriv + std::log(d) : node.log_deriv;
        next.push_back({y.point, ld});
      }
    }
    level = std::move(next);
  }
  JuliaCloud cloud(std::move(all));
  cloud.resolved_ = resolved;
  return cloud;
}

JuliaCloud JuliaCloud::from_points(std::vector<SpherePoint> points) { return JuliaCloud(std::move(points)); }

JuliaCloud::JuliaCloud(std::vector<SpherePoint> points) : points_(std::move(points)) {
  std::vector<std::pair<Key, std::uint32_t>> keyed;
  keyed.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto e = points_[i].embed();
    const long ix = static_cast<long>(std::floor(e[0] / cell_));
    const long iy = static_cast<long>(std::floor(e[1] / cell_));
    const long iz = static_cast<long>(std::floor(e[2] / cell_));
    keyed.emplace_back(key_of(ix, iy, iz), static_cast<std::uint32_t>(i));
  }
  std::sort(keyed.begin(), keyed.end());
  order_.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) {
      cell_keys_.push_back(keyed[i].first);
      cell_start_.push_back(static_cast<std::uint32_t>(i));
    }
    order_.push_back(keyed[i].second);
  }
  cell_start_.push_back(static_cast<std::uint32_t>(keyed.size()));
}

JuliaCloud::Key JuliaCloud::key_of(long ix, long iy, long iz) const {
  // coordinates lie in [-1, 1], so cell indices fit comfortably in 21 bits
  const auto pack = [](long v) { return static_cast<std::uint64_t>(v + (1L << 20)) & 0x1FFFFF; };
  return pack(ix) | (pack(iy) << 21) | (pack(iz) << 42);
}

double JuliaCloud::nearest_distance(const SpherePoint& z, double max_radius) const {
  const auto e = z.embed();
  double best = std::numeric_limits<double>::infinity();
  const long reach = static_cast<long>(std::ceil(max_radius / cell_));
  if (reach > 8) {
    for (const SpherePoint& p : points_) best = std::min(best, embedded_distance(e, p.embed()));
  } else {
    const long cx = static_cast<long>(std::floor(e[0] / cell_));
    const long cy = static_cast<long>(std::floor(e[1] / cell_));
    const long cz = static_cast<long>(std::floor(e[2] / cell_));
    for (long dx = -reach; dx <= reach; ++dx)
      for (long dy = -reach; dy <= reach; ++dy)
        for (long dz = -reach; dz <= reach; ++dz) {
          const Key k = key_of(cx + dx, cy + dy, cz + dz);
          const auto it = std::lower_bound(cell_keys_.begin(), cell_keys_.end(), k);
          if (it == cell_keys_.end() || *it != k) continue;
          const std::size_t c = static_cast<std::size_t>(it - cell_keys_.begin());
          for (std::uint32_t j = cell_start_[c]; j < cell_start_[c + 1]; ++j)
            best = std::min(best, embedded_distance(e, points_[order_[j]].embed()));
        }
  }
  return best <= max_radius ? best : std::numeric_limits<double>::infinity();
}

}  // namespace tce
