#include "tcethermo/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tcethermo/errors.hpp"
#include "tcethermo/parallel.hpp"

namespace tce {

double AtomicMeasure::total() const {
  CompensatedSum s;
  for (double w : weights) s.add(w);
  return s.value();
}

void AtomicMeasure::normalize() {
  const double t = total();
  if (!(t > 0.0)) throw InvalidArgument("cannot normalize a measure of zero mass");
  for (double& w : weights) w /= t;
  normalized = true;
}

double AtomicMeasure::integrate(const RationalMap& map, const Observable& f) const {
  CompensatedSum s;
  for (std::size_t i = 0; i < atoms.size(); ++i) s.add(weights[i] * f(map, atoms[i]));
  return s.value();
}

double AtomicMeasure::integrate_pushforward(const RationalMap& map, const Observable& f) const {
  CompensatedSum s;
  for (std::size_t i = 0; i < atoms.size(); ++i) s.add(weights[i] * f(map, eval(map, atoms[i])));
  return s.value();
}

namespace {

AtomicMeasure from_log_weights(std::vector<SpherePoint> atoms, const std::vector<double>& log_w) {
  LogSumExp z;
  for (double lw : log_w) z.add(lw);
  const double log_z = z.value();
  AtomicMeasure m;
  m.atoms = std::move(atoms);
  m.weights.reserve(log_w.size());
  for (double lw : log_w) m.weights.push_back(std::exp(lw - log_z));
  m.normalized = true;
  return m;
}

}  // namespace

SignedLog apply_Ln_at(const RationalMap& map, const Observable& phi, const Observable& psi, const SpherePoint& x,
                      int n, const TreeOptions& opts) {
  const PreimageTree tree = preimage_tree(map, phi, {}, x, n, opts);
  LogSumExp pos;
  LogSumExp neg;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const double v = psi(map, tree.leaves[i]);
    if (v > 0.0) pos.add(tree.log_weight(i) + std::log(v));
    if (v < 0.0) neg.add(tree.log_weight(i) + std::log(-v));
  }
  return log_difference(pos.value(), neg.value());
}

double log_eigenvalue(const RationalMap& map, const Observable& phi, const SpherePoint& x0, int n,
                      const TreeOptions& opts) {
  if (n < 1) throw InvalidArgument("log_eigenvalue needs n >= 1");
  const std::vector<double> masses = fiber_log_masses(map, phi, x0, n, opts);
  return masses[n] - masses[n - 1];
}

double cesaro_h(const RationalMap& map, const Observable& phi, const SpherePoint& x, int n, double logP,
                const TreeOptions& opts) {
  if (n < 1) throw InvalidArgument("cesaro_h needs n >= 1");
  if (n == 1) return 1.0;
  const std::vector<double> masses = fiber_log_masses(map, phi, x, n - 1, opts);
  CompensatedSum s;
  for (int k = 0; k < n; ++k) s.add(std::exp(masses[k] - k * logP));
  return s.value() / n;
}

AtomicMeasure conformal_atoms(const RationalMap& map, const Observable& phi, const SpherePoint& x0, int n,
                              const TreeOptions& opts) {
  PreimageTree tree = preimage_tree(map, phi, {}, x0, n, opts);
  std::vector<double> lw(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) lw[i] = tree.log_weight(i);
  return from_log_weights(std::move(tree.leaves), lw);
}

AtomicMeasure equilibrium_atoms(const RationalMap& map, const Observable& phi, const SpherePoint& x0, int n,
                                double logP, int m, const TreeOptions& opts) {
  if (m < 0) m = n / 2;
  PreimageTree tree = preimage_tree(map, phi, {}, x0, n, opts);
  std::vector<double> lw(tree.size());
  // L^k 1 is constant in x for a constant potential, so the density drops
  // out after normalization
  if (m <= 1 || phi.is_constant()) {
    for (std::size_t i = 0; i < tree.size(); ++i) lw[i] = tree.log_weight(i);
  } else {
    parallel_for(tree.size(), [&](std::size_t i) {
      lw[i] = tree.log_weight(i) + std::log(cesaro_h(map, phi, tree.leaves[i], m, logP, opts));
    });
  }
  return from_log_weights(std::move(tree.leaves), lw);
}

double conformality_ratio(const RationalMap& map, const AtomicMeasure& eta, const Observable& phi, double logP,
                          double start, double end) {
  const auto d = map.monomial_degree();
  if (!d) throw InvalidArgument("arc conformality is only available for monomial maps");
  if (!(end > start) || (end - start) * *d > 1.0 + 1e-15) {
    throw InvalidArgument("arc is not an injectivity domain of the map");
  }
  const auto turn = [](const SpherePoint& z) {
    double t = std::arg(z.value()) / (2.0 * std::numbers::pi);
    return t - std::floor(t);
  };
  const auto in_arc = [](double t, double a, double len) {
    double u = t - a;
    u -= std::floor(u);
    return u < len;
  };
  const double len = end - start;
  const double image_start = *d * start;
  const double image_len = *d * len;
  CompensatedSum image_mass;
  CompensatedSum jacobian_integral;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const SpherePoint& a = eta.atoms[i];
    if (a.is_infinity() || a.value() == Complex{0.0, 0.0}) continue;
    const double t = turn(a);
    if (image_len >= 1.0 || in_arc(t, image_start, image_len)) image_mass.add(eta.weights[i]);
    if (in_arc(t, start, len)) jacobian_integral.add(eta.weights[i] * std::exp(logP - phi(map, a)));
  }
  return image_mass.value() / jacobian_integral.value();
}

DualPair dual_identity(const RationalMap& map, const AtomicMeasure& eta, const Observable& phi, const Observable& g,
                       double logP, const SolverOptions& opts) {
  CompensatedSum lhs;
  CompensatedSum rhs;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    CompensatedSum transfer;
    for (const Preimage& y : preimages(map, eta.atoms[i], opts)) {
      transfer.add(y.multiplicity * std::exp(phi(map, y.point)) * g(map, y.point));
    }
    lhs.add(eta.weights[i] * transfer.value());
    rhs.add(eta.weights[i] * g(map, eta.atoms[i]));
  }
  return {lhs.value(), std::exp(logP) * rhs.value()};
}

double c0_bound(const RationalMap& map, const Observable& phi, const std::vector<SpherePoint>& sample, int n,
                const TreeOptions& opts) {
  if (sample.empty()) throw InvalidArgument("c0_bound needs a nonempty sample");
  std::vector<double> logs(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    logs[i] = apply_Ln_at(map, phi, Observable::constant(1.0), sample[i], n, opts).log_abs;
  }
  const auto [lo, hi] = std::minmax_element(logs.begin(), logs.end());
  return std::exp(*hi - *lo);
}

RpfResiduals rpf_residuals(const RationalMap& map, const Observable& phi, const std::vector<SpherePoint>& sample,
                           int n, double logP, const RpfOptions& opts) {
  if (sample.empty()) throw InvalidArgument("rpf_residuals needs a nonempty sample");
  const int m = opts.cesaro_depth < 0 ? std::max(1, n / 2) : opts.cesaro_depth;
  RpfResiduals out;
  out.density.points = sample;
  out.density.log_lambda = logP;
  out.density.values.resize(sample.size());
  std::vector<double> residual(sample.size());
  parallel_for(sample.size(), [&](std::size_t i) {
    const double h = cesaro_h(map, phi, sample[i], m, logP, opts.tree);
    CompensatedSum lh;
    for (const Preimage& y : preimages(map, sample[i], opts.tree.solver)) {
      lh.add(y.multiplicity * std::exp(phi(map, y.point)) * cesaro_h(map, phi, y.point, m, logP, opts.tree));
    }
    out.density.values[i] = h;
    residual[i] = std::abs(std::exp(-logP) * lh.value() - h) / h;
  });
  out.eigen_residual = *std::max_element(residual.begin(), residual.end());
  const auto [lo, hi] = std::minmax_element(out.density.values.begin(), out.density.values.end());
  out.density.ratio_bound = *hi / *lo;
  out.c0_bound = c0_bound(map, phi, sample, n, opts.tree);

  const int eq_depth = opts.equilibrium_depth < 0 ? n : opts.equilibrium_depth;
  const AtomicMeasure mu = equilibrium_atoms(map, phi, sample[0], eq_depth, logP, m, opts.tree);
  const Observable tests[] = {Observable::re_poly({0.0, 1.0}), Observable::im_poly({0.0, 1.0}),
                              Observable::re_poly({0.0, 0.0, 1.0})};
  for (const Observable& g : tests) {
    out.invariance_residual =
        std::max(out.invariance_residual, std::abs(mu.integrate_pushforward(map, g) - mu.integrate(map, g)));
  }
  return out;
}

}  // namespace tce
