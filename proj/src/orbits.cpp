#include "tcethermo/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "tcethermo/errors.hpp"
#include "tcethermo/numeric.hpp"
#include "tcethermo/parallel.hpp"

namespace tce {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct NewtonOutcome {
  bool ok = false;
  Complex point;
};

// Newton on F(z) = T^n(z) - z in the affine chart.
NewtonOutcome newton_periodic(const RationalMap& map, int n, Complex z, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    Complex w = z;
    Complex deriv{1.0, 0.0};
    for (int k = 0; k < n; ++k) {
      deriv *= derivative(map, w);
      const SpherePoint next = eval(map, SpherePoint(w));
      if (next.is_infinity()) return {};
      w = next.value();
    }
    const Complex step = (w - z) / (deriv - 1.0);
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return {};
    z -= step;
    if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(z))) return {true, z};
  }
  return {true, z};
}

// Hash set of points at a fixed chordal resolution.
class PointIndex {
 public:
  explicit PointIndex(double radius) : radius_(radius) {}

  bool contains_near(const SpherePoint& p) const {
    const auto e = p.embed();
    const auto c = cell(e);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy)
        for (long dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find(key(c[0] + dx, c[1] + dy, c[2] + dz));
          if (it == cells_.end()) continue;
          for (const auto& q : it->second)
            if (embedded_distance(e, q) < radius_) return true;
        }
    return false;
  }

  void insert(const SpherePoint& p) {
    const auto e = p.embed();
    const auto c = cell(e);
    cells_[key(c[0], c[1], c[2])].push_back(e);
  }

 private:
  std::array<long, 3> cell(const std::array<double, 3>& e) const {
    return {static_cast<long>(std::floor(e[0] / radius_)), static_cast<long>(std::floor(e[1] / radius_)),
            static_cast<long>(std::floor(e[2] / radius_))};
  }
  static std::uint64_t key(long x, long y, long z) {
    const auto h = [](long v) { return static_cast<std::uint64_t>(v) * 0x9E3779B97F4A7C15ULL; };
    return h(x) ^ (h(y) >> 1) ^ (h(z) << 1) ^ static_cast<std::uint64_t>(z);
  }

  double radius_;
  std::unordered_map<std::uint64_t, std::vector<std::array<double, 3>>> cells_;
};

}  // namespace

PeriodicSet periodic_points(const RationalMap& map, int n, const JuliaCloud& cloud, const PeriodicOptions& opts) {
  if (n < 1) throw InvalidArgument("periodic_points needs n >= 1");
  check_budget(map.degree(), n, opts.tree.atom_budget);
  const SpherePoint fixed = repelling_fixed_point(map, opts.tree.solver);
  int extra = std::max(0, opts.oversample);
  while (extra > 0 && std::pow(static_cast<double>(map.degree()), n + extra) >
                          static_cast<double>(opts.tree.atom_budget)) {
    --extra;
  }
  const PreimageTree tree = preimage_tree(map, Observable::constant(0.0), {}, fixed, n + extra, opts.tree);

  struct Candidate {
    bool ok = false;
    SpherePoint point;
    double multiplier = 0.0;
    double residual = 0.0;
  };
  std::vector<Candidate> cand(tree.size());
  parallel_for(tree.size(), [&](std::size_t i) {
    const SpherePoint& leaf = tree.leaves[i];
    if (leaf.is_infinity()) return;
    const NewtonOutcome r = newton_periodic(map, n, leaf.value(), opts.newton_max_iter);
    if (!r.ok) return;
    Candidate& c = cand[i];
    c.point = SpherePoint(r.point);
    double mult = 1.0;
    SpherePoint w = c.point;
    for (int k = 0; k < n; ++k) {
      mult *= sph_deriv_abs(map, w);
      w = eval(map, w);
    }
    c.multiplier = mult;
    c.residual = chordal(w, c.point);
    c.ok = true;
  });

  PeriodicSet out;
  out.period = n;
  PointIndex seen(opts.dedup_radius);
  double worst_tol = 0.0;
  for (const Candidate& c : cand) {
    if (!c.ok || seen.contains_near(c.point)) continue;
    const double tol = std::max(1e-10, 64.0 * kEps * c.multiplier);
    if (!(c.residual < tol)) continue;
    seen.insert(c.point);
    ++out.candidates;
    if (c.multiplier < opts.min_multiplier) continue;
    if (!cloud.near(c.point, opts.julia_delta)) continue;
    worst_tol = std::max(worst_tol, tol);
    out.points.push_back({c.point, c.multiplier});
  }
  out.residual_tolerance = std::max(1e-10, worst_tol);
  std::sort(out.points.begin(), out.points.end(),
            [](const PeriodicPoint& a, const PeriodicPoint& b) { return lex_less(a.point, b.point); });
  return out;
}

namespace {

double bowen_distance(const std::vector<std::array<double, 3>>& a, const std::vector<std::array<double, 3>>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, embedded_distance(a[j], b[j]));
  return d;
}

}  // namespace

std::vector<SpherePoint> separated_set(const std::vector<SpherePoint>& points, const RationalMap& map, int n,
                                       double eps) {
  if (n < 1) throw InvalidArgument("separated_set needs n >= 1");
  std::vector<std::vector<std::array<double, 3>>> orbits(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    SpherePoint z = points[i];
    orbits[i].reserve(n);
    for (int j = 0; j < n; ++j) {
      orbits[i].push_back(z.embed());
      if (j + 1 < n) z = eval(map, z);
    }
  });
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool separated = true;
    for (std::size_t k : kept) {
      if (bowen_distance(orbits[i], orbits[k]) <= eps) {
        separated = false;
        break;
      }
    }
    if (separated) kept.push_back(i);
  }
  std::vector<SpherePoint> out;
  out.reserve(kept.size());
  for (std::size_t k : kept) out.push_back(points[k]);
  return out;
}

BowenCloud::BowenCloud(const RationalMap& map, const SpherePoint& x0, int depth, const TreeOptions& opts)
    : depth_(depth) {
  if (depth < 1) throw InvalidArgument("BowenCloud needs depth >= 1");
  check_budget(map.degree(), depth, opts.atom_budget);
  levels_.push_back({x0});
  parent_.push_back({0});
  for (int k = 0; k < depth; ++k) {
    const std::vector<SpherePoint>& cur = levels_.back();
    std::vector<PreimageSet> fibers(cur.size());
    parallel_for(cur.size(), [&](std::size_t i) { fibers[i] = preimages(map, cur[i], opts.solver); });
    std::vector<SpherePoint> next;
    std::vector<std::uint32_t> parents;
    std::vector<std::uint32_t> first(cur.size() + 1, 0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      first[i] = static_cast<std::uint32_t>(next.size());
      for (const Preimage& y : fibers[i]) {
        next.push_back(y.point);
        parents.push_back(static_cast<std::uint32_t>(i));
      }
    }
    first[cur.size()] = static_cast<std::uint32_t>(next.size());
    first_child_.push_back(std::move(first));
    levels_.push_back(std::move(next));
    parent_.push_back(std::move(parents));
  }
}

std::size_t BowenCloud::ancestor(std::size_t leaf, int j) const {
  std::size_t idx = leaf;
  for (int k = depth_; k > depth_ - j; --k) idx = parent_[k][idx];
  return idx;
}

SpherePoint BowenCloud::iterate(std::size_t leaf, int j) const { return levels_[depth_ - j][ancestor(leaf, j)]; }

double BowenCloud::birkhoff(const RationalMap& map, const Observable& obs, std::size_t leaf, int n) const {
  if (n > depth_) throw InvalidArgument("Birkhoff length exceeds the cloud depth");
  CompensatedSum acc;
  std::size_t idx = leaf;
  for (int j = 0; j < n; ++j) {
    acc.add(obs(map, levels_[depth_ - j][idx]));
    idx = parent_[depth_ - j][idx];
  }
  return acc.value();
}

std::vector<std::size_t> BowenCloud::separated(int n, double eps) const {
  if (n < 1 || n > depth_) throw InvalidArgument("separated needs 1 <= n <= depth");
  const int top = depth_ - n + 1;  // depth holding T^{n-1} of the leaves
  std::vector<std::vector<char>> has_kept(levels_.size());
  for (int k = top; k <= depth_; ++k) has_kept[k].assign(levels_[k].size(), 0);

  std::vector<std::array<double, 3>> chain(depth_ + 1);
  std::vector<std::array<double, 3>> top_embed(levels_[top].size());
  for (std::size_t i = 0; i < levels_[top].size(); ++i) top_embed[i] = levels_[top][i].embed();

  // True if some kept leaf below `node` (at depth k) tracks the chain.
  const auto conflict = [&](auto&& self, int k, std::size_t node) -> bool {
    if (k == depth_) return true;
    for (std::uint32_t c = first_child_[k][node]; c < first_child_[k][node + 1]; ++c) {
      if (!has_kept[k + 1][c]) continue;
      if (embedded_distance(levels_[k + 1][c].embed(), chain[k + 1]) > eps) continue;
      if (self(self, k + 1, c)) return true;
    }
    return false;
  };

  std::vector<std::size_t> kept;
  for (std::size_t leaf = 0; leaf < leaf_count(); ++leaf) {
    std::size_t idx = leaf;
    std::vector<std::size_t> path(depth_ + 1);
    for (int k = depth_; k >= top; --k) {
      path[k] = idx;
      chain[k] = levels_[k][idx].embed();
      if (k > 0) idx = parent_[k][idx];
    }
    bool clash = false;
    for (std::size_t t = 0; t < levels_[top].size() && !clash; ++t) {
      if (!has_kept[top][t]) continue;
      if (embedded_distance(top_embed[t], chain[top]) > eps) continue;
      clash = conflict(conflict, top, t);
    }
    if (clash) continue;
    kept.push_back(leaf);
    for (int k = top; k <= depth_; ++k) has_kept[k][path[k]] = 1;
  }
  return kept;
}

EscReport esc_diagnostic(const RationalMap& map, const SpherePoint& x, double r0, int n_max, int probes,
                         const JuliaCloud& cloud, const TreeOptions& opts) {
  if (!(r0 > 0.0 && r0 < 1.0)) throw InvalidArgument("esc_diagnostic needs r0 in (0, 1)");
  if (n_max < 1 || probes < 1) throw InvalidArgument("esc_diagnostic needs n_max >= 1 and probes >= 1");
  check_budget(map.degree(), n_max, opts.atom_budget);

  std::vector<SpherePoint> inside;
  for (const SpherePoint& p : cloud.points()) {
    if (chordal(p, x) < r0) inside.push_back(p);
  }
  std::sort(inside.begin(), inside.end(), lex_less);
  std::vector<SpherePoint> seeds{x};
  if (!inside.empty()) {
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(probes), inside.size());
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t idx = take == 1 ? 0 : i * (inside.size() - 1) / (take - 1);
      seeds.push_back(inside[idx]);
    }
  }

  EscReport report;
  report.radius = r0;
  report.probes = seeds.size();
  const auto diameter = [](const std::vector<SpherePoint>& pts) {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, chordal(pts[i], pts[j]));
    return d;
  };
  // level[b] holds the pullbacks of every seed along branch b; seed 0 is the
  // reference point whose preimages define the branches.
  std::vector<std::vector<SpherePoint>> level{seeds};
  report.diameters.push_back(diameter(seeds));
  for (int k = 1; k <= n_max; ++k) {
    std::vector<std::vector<std::vector<SpherePoint>>> children(level.size());
    parallel_for(level.size(), [&](std::size_t b) {
      const std::vector<SpherePoint>& group = level[b];
      const PreimageSet ref = preimages(map, group[0], opts.solver);
      std::vector<std::vector<SpherePoint>> kids(ref.size());
      for (std::size_t c = 0; c < ref.size(); ++c) kids[c].push_back(ref[c].point);
      for (std::size_t s = 1; s < group.size(); ++s) {
        const PreimageSet fib = preimages(map, group[s], opts.solver);
        for (std::size_t c = 0; c < ref.size(); ++c) {
          const auto nearest = std::min_element(fib.begin(), fib.end(), [&](const Preimage& a, const Preimage& b2) {
            return chordal(a.point, ref[c].point) < chordal(b2.point, ref[c].point);
          });
          kids[c].push_back(nearest->point);
        }
      }
      children[b] = std::move(kids);
    });
    std::vector<std::vector<SpherePoint>> next;
    for (auto& kids : children)
      for (auto& g : kids) next.push_back(std::move(g));
    double worst = 0.0;
    for (const auto& g : next) worst = std::max(worst, diameter(g));
    report.diameters.push_back(worst);
    level = std::move(next);
  }

  // least squares of log diameter against depth
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < report.diameters.size(); ++k) {
    if (!(report.diameters[k] > 0.0)) continue;
    const double y = std::log(report.diameters[k]);
    sx += k;
    sy += y;
    sxx += static_cast<double>(k) * k;
    sxy += k * y;
    ++m;
  }
  const double denom = m * sxx - sx * sx;
  report.rate = denom > 0.0 ? std::exp(-(m * sxy - sx * sy) / denom) : std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace tce
