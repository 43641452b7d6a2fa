#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcethermo/observable.hpp"
#include "tcethermo/rational_map.hpp"

namespace tce {

struct TreeOptions {
  std::uint64_t atom_budget = std::uint64_t{1} << 24;
  SolverOptions solver;
};

/// Leaves of T^{-n}(x0) in depth-first order, children sorted
/// lexicographically at every level. Column-oriented: entry i of every
/// array describes leaf i.
struct PreimageTree {
  SpherePoint root;
  int depth = 0;
  std::vector<SpherePoint> leaves;
  std::vector<std::uint64_t> multiplicity;  ///< product of local degrees along the branch
  std::vector<double> weight_log;           ///< S_n(phi)(leaf)
  std::vector<std::string> observable_names;
  std::vector<std::vector<double>> sums;    ///< sums[j][i] = S_n(obs_j)(leaf i)

  std::size_t size() const { return leaves.size(); }
  std::uint64_t total_multiplicity() const;
  /// log(multiplicity) + weight_log: the log-weight of the leaf in L^n 1(x0).
  double log_weight(std::size_t i) const;
  const std::vector<double>& sum_of(const std::string& name) const;
};

/// Throws DepthTooLarge when d^n exceeds the budget.
void check_budget(int degree, int depth, std::uint64_t budget);

PreimageTree preimage_tree(const RationalMap& map, const Observable& phi, const std::vector<Observable>& extra,
                           const SpherePoint& x0, int n, const TreeOptions& opts = {});

/// log L_phi^k 1(x) for k = 0..depth, by a single depth-first sweep.
std::vector<double> fiber_log_masses(const RationalMap& map, const Observable& phi, const SpherePoint& x, int depth,
                                     const TreeOptions& opts = {});

/// Binary cache: "TCETREE1", u32 observable count, u64 leaf count, then per
/// leaf re, im, weight_log and the observable sums as little-endian f64.
/// Infinity is stored as re = +inf. Multiplicities are not persisted and
/// read back as 1, which is exact away from critical values.
void write_tree_cache(const PreimageTree& tree, const std::string& path);
PreimageTree read_tree_cache(const std::string& path);

}  // namespace tce
