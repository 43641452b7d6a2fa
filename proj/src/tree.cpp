#include "tcethermo/tree.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tcethermo/errors.hpp"
#include "tcethermo/numeric.hpp"
#include "tcethermo/parallel.hpp"

namespace tce {

std::uint64_t PreimageTree::total_multiplicity() const {
  std::uint64_t total = 0;
  for (std::uint64_t m : multiplicity) total += m;
  return total;
}

double PreimageTree::log_weight(std::size_t i) const {
  return weight_log[i] + (multiplicity[i] == 1 ? 0.0 : std::log(static_cast<double>(multiplicity[i])));
}

const std::vector<double>& PreimageTree::sum_of(const std::string& name) const {
  for (std::size_t j = 0; j < observable_names.size(); ++j) {
    if (observable_names[j] == name) return sums[j];
  }
  throw UnknownObservable("tree has no observable named '" + name + "'");
}

void check_budget(int degree, int depth, std::uint64_t budget) {
  if (depth < 0) throw InvalidArgument("negative depth");
  const double atoms = std::pow(static_cast<double>(degree), depth);
  if (atoms > static_cast<double>(budget)) {
    std::ostringstream msg;
    msg << degree << "^" << depth << " = " << atoms << " atoms exceeds the budget of " << budget;
    throw DepthTooLarge(msg.str());
  }
}

namespace {

// Partial branch state: a node of the tree with sums accumulated over the
// path below the root (the root itself contributes nothing).
struct Node {
  SpherePoint point;
  std::uint64_t multiplicity = 1;
  std::vector<CompensatedSum> sums;  // [0] is phi, then the extra observables
};

struct LeafBlock {
  std::vector<SpherePoint> leaves;
  std::vector<std::uint64_t> multiplicity;
  std::vector<std::vector<double>> sums;
};

class Expander {
 public:
  Expander(const RationalMap& map, const std::vector<const Observable*>& obs, const SolverOptions& solver)
      : map_(map), obs_(obs), solver_(solver) {}

  std::vector<Node> children(const Node& parent) const {
    std::vector<Node> out;
    for (const Preimage& y : preimages(map_, parent.point, solver_)) {
      Node child{y.point, parent.multiplicity * static_cast<std::uint64_t>(y.multiplicity), parent.sums};
      for (std::size_t j = 0; j < obs_.size(); ++j) child.sums[j].add((*obs_[j])(map_, y.point));
      out.push_back(std::move(child));
    }
    return out;
  }

  void dfs(const Node& node, int remaining, LeafBlock& block) const {
    if (remaining == 0) {
      block.leaves.push_back(node.point);
      block.multiplicity.push_back(node.multiplicity);
      for (std::size_t j = 0; j < obs_.size(); ++j) block.sums[j].push_back(node.sums[j].value());
      return;
    }
    for (const Node& child : children(node)) dfs(child, remaining - 1, block);
  }

 private:
  const RationalMap& map_;
  const std::vector<const Observable*>& obs_;
  const SolverOptions& solver_;
};

}  // namespace

PreimageTree preimage_tree(const RationalMap& map, const Observable& phi, const std::vector<Observable>& extra,
                           const SpherePoint& x0, int n, const TreeOptions& opts) {
  if (n < 1) throw InvalidArgument("preimage_tree needs n >= 1");
  check_budget(map.degree(), n, opts.atom_budget);

  std::vector<const Observable*> obs{&phi};
  for (const Observable& o : extra) obs.push_back(&o);
  const Expander expander(map, obs, opts.solver);

  // Expand breadth-first to a frontier of fixed size, independent of the
  // thread count, then run the subtrees as independent tasks.
  constexpr std::size_t kFrontier = 64;
  std::vector<Node> frontier{Node{x0, 1, std::vector<CompensatedSum>(obs.size())}};
  int level = 0;
  while (level < n && frontier.size() < kFrontier) {
    std::vector<Node> next;
    for (const Node& node : frontier) {
      for (Node& child : expander.children(node)) next.push_back(std::move(child));
    }
    frontier = std::move(next);
    ++level;
  }
  const int remaining = n - level;

  std::vector<LeafBlock> blocks(frontier.size());
  parallel_for(frontier.size(), [&](std::size_t i) {
    blocks[i].sums.resize(obs.size());
    expander.dfs(frontier[i], remaining, blocks[i]);
  });

  PreimageTree tree;
  tree.root = x0;
  tree.depth = n;
  for (const Observable& o : extra) tree.observable_names.push_back(o.name());
  std::size_t total = 0;
  for (const LeafBlock& b : blocks) total += b.leaves.size();
  tree.leaves.reserve(total);
  tree.multiplicity.reserve(total);
  tree.weight_log.reserve(total);
  tree.sums.assign(extra.size(), {});
  for (auto& s : tree.sums) s.reserve(total);
  for (LeafBlock& b : blocks) {
    tree.leaves.insert(tree.leaves.end(), b.leaves.begin(), b.leaves.end());
    tree.multiplicity.insert(tree.multiplicity.end(), b.multiplicity.begin(), b.multiplicity.end());
    tree.weight_log.insert(tree.weight_log.end(), b.sums[0].begin(), b.sums[0].end());
    for (std::size_t j = 0; j < extra.size(); ++j) {
      tree.sums[j].insert(tree.sums[j].end(), b.sums[j + 1].begin(), b.sums[j + 1].end());
    }
  }
  return tree;
}

namespace {

void mass_dfs(const RationalMap& map, const Observable& phi, const SolverOptions& solver, const SpherePoint& x,
              double log_weight, int level, int depth, std::vector<LogSumExp>& acc) {
  acc[level].add(log_weight);
  if (level == depth) return;
  for (const Preimage& y : preimages(map, x, solver)) {
    const double lw = log_weight + std::log(static_cast<double>(y.multiplicity)) + phi(map, y.point);
    mass_dfs(map, phi, solver, y.point, lw, level + 1, depth, acc);
  }
}

}  // namespace

std::vector<double> fiber_log_masses(const RationalMap& map, const Observable& phi, const SpherePoint& x, int depth,
                                     const TreeOptions& opts) {
  check_budget(map.degree(), depth, opts.atom_budget);
  std::vector<LogSumExp> acc(depth + 1);
  mass_dfs(map, phi, opts.solver, x, 0.0, 0, depth, acc);
  std::vector<double> out;
  out.reserve(acc.size());
  for (const LogSumExp& a : acc) out.push_back(a.value());
  return out;
}

namespace {

constexpr char kMagic[8] = {'T', 'C', 'E', 'T', 'R', 'E', 'E', '1'};

template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw IoError("truncated tree cache");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_tree_cache(const PreimageTree& tree, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(tree.sums.size()));
  put_le<std::uint64_t>(os, tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const SpherePoint& p = tree.leaves[i];
    put_le<double>(os, p.is_infinity() ? INFINITY : p.value().real());
    put_le<double>(os, p.is_infinity() ? 0.0 : p.value().imag());
    put_le<double>(os, tree.weight_log[i]);
    for (const auto& s : tree.sums) put_le<double>(os, s[i]);
  }
  if (!os) throw IoError("write failed for " + path);
}

PreimageTree read_tree_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw IoError(path + " is not a tree cache");
  const auto nobs = get_le<std::uint32_t>(is);
  const auto count = get_le<std::uint64_t>(is);
  PreimageTree tree;
  tree.sums.assign(nobs, {});
  for (std::uint32_t j = 0; j < nobs; ++j) tree.observable_names.push_back("obs" + std::to_string(j));
  for (std::uint64_t i = 0; i < count; ++i) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    tree.leaves.push_back(std::isinf(re) ? SpherePoint::infinity() : SpherePoint(re, im));
    tree.multiplicity.push_back(1);
    tree.weight_log.push_back(get_le<double>(is));
    for (auto& s : tree.sums) s.push_back(get_le<double>(is));
  }
  return tree;
}

}  // namespace tce
