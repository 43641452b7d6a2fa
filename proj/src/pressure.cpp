#include "tcethermo/pressure.hpp"

#include <algorithm>
#include <cmath>

#include "tcethermo/errors.hpp"
#include "tcethermo/parallel.hpp"

namespace tce {

const char* method_name(PressureMethod m) {
  switch (m) {
    case PressureMethod::Tree:
      return "tree";
    case PressureMethod::Periodic:
      return "periodic";
    case PressureMethod::Birkhoff:
      return "birkhoff";
    case PressureMethod::Separated:
      return "separated";
  }
  return "?";
}

PressureEstimate pressure_tree(const RationalMap& map, const Observable& phi, const SpherePoint& x0, int n,
                               const TreeOptions& opts) {
  const SignedLog v = apply_Ln_at(map, phi, Observable::constant(1.0), x0, n, opts);
  return {v.log_abs / n, PressureMethod::Tree, n, static_cast<std::size_t>(std::pow(map.degree(), n))};
}

namespace {

std::vector<double> periodic_sums(const RationalMap& map, const Observable& f, const PeriodicSet& per) {
  std::vector<double> s(per.points.size());
  parallel_for(per.points.size(), [&](std::size_t i) { s[i] = birkhoff_sum(map, f, per.points[i].point, per.period); });
  return s;
}

}  // namespace

PressureEstimate pressure_periodic(const RationalMap& map, const Observable& phi, const PeriodicSet& per) {
  if (per.points.empty()) throw EmptyPeriodicSet("no periodic points of period " + std::to_string(per.period) + " on J");
  const std::vector<double> s = periodic_sums(map, phi, per);
  return {log_sum_exp(s) / per.period, PressureMethod::Periodic, per.period, s.size()};
}

PressureEstimate pressure_periodic(const RationalMap& map, const Observable& phi, int n, const JuliaCloud& cloud,
                                   const PeriodicOptions& opts) {
  return pressure_periodic(map, phi, periodic_points(map, n, cloud, opts));
}

PressureEstimate pressure_birkhoff(const RationalMap& map, const Observable& psi, const AtomicMeasure& mu, int n) {
  if (n < 1) throw InvalidArgument("pressure_birkhoff needs n >= 1");
  if (psi.kind() == ObservableKind::Constant) return {psi.params()[0], PressureMethod::Birkhoff, n, mu.size()};
  std::vector<double> terms(mu.size());
  parallel_for(mu.size(), [&](std::size_t i) {
    terms[i] = mu.weights[i] > 0.0 ? std::log(mu.weights[i]) + birkhoff_sum(map, psi, mu.atoms[i], n)
                                   : -std::numeric_limits<double>::infinity();
  });
  return {log_sum_exp(terms) / n, PressureMethod::Birkhoff, n, mu.size()};
}

PressureEstimate pressure_separated(const RationalMap& map, const Observable& phi,
                                   const std::vector<SpherePoint>& cloud, double eps, int n) {
  const std::vector<SpherePoint> kept = separated_set(cloud, map, n, eps);
  std::vector<double> s(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) s[i] = birkhoff_sum(map, phi, kept[i], n);
  return {log_sum_exp(s) / n, PressureMethod::Separated, n, kept.size()};
}

PressureEstimate pressure_separated(const RationalMap& map, const Observable& phi, const BowenCloud& cloud,
                                   double eps, int n) {
  const std::vector<std::size_t> kept = cloud.separated(n, eps);
  std::vector<double> s(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) s[i] = cloud.birkhoff(map, phi, kept[i], n);
  return {log_sum_exp(s) / n, PressureMethod::Separated, n, kept.size()};
}

double PressureCurve::min_second_difference() const {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    const double h1 = q[i] - q[i - 1];
    const double h2 = q[i + 1] - q[i];
    // second divided difference scaled to the local spacing
    const double dd = 2.0 * ((pressure[i + 1] - pressure[i]) / h2 - (pressure[i] - pressure[i - 1]) / h1) / (h1 + h2);
    worst = std::min(worst, dd * h1 * h2);
  }
  return worst;
}

double PressureCurve::at_zero() const {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) return pressure[i];
  }
  throw InvalidArgument("q = 0 is not on the pressure curve grid");
}

PressureCurve pressure_curve_tree(const RationalMap& map, const Observable& phi, const Observable& psi,
                                  const std::vector<double>& q_grid, const SpherePoint& x0, int n,
                                  const TreeOptions& opts) {
  const PreimageTree tree = preimage_tree(map, phi, {psi.with_name("direction")}, x0, n, opts);
  PressureCurve c;
  c.q = q_grid;
  c.method = PressureMethod::Tree;
  c.depth = n;
  c.pressure.resize(q_grid.size());
  parallel_for(q_grid.size(), [&](std::size_t k) {
    LogSumExp acc;
    for (std::size_t i = 0; i < tree.size(); ++i) acc.add(tree.log_weight(i) + q_grid[k] * tree.sums[0][i]);
    c.pressure[k] = acc.value() / n;
  });
  return c;
}

PressureCurve pressure_curve_periodic(const RationalMap& map, const Observable& phi, const Observable& psi,
                                      const std::vector<double>& q_grid, const PeriodicSet& per) {
  if (per.points.empty()) throw EmptyPeriodicSet("no periodic points of period " + std::to_string(per.period) + " on J");
  const std::vector<double> sphi = periodic_sums(map, phi, per);
  const std::vector<double> spsi = periodic_sums(map, psi, per);
  PressureCurve c;
  c.q = q_grid;
  c.method = PressureMethod::Periodic;
  c.depth = per.period;
  c.pressure.resize(q_grid.size());
  parallel_for(q_grid.size(), [&](std::size_t k) {
    LogSumExp acc;
    for (std::size_t i = 0; i < sphi.size(); ++i) acc.add(sphi[i] + q_grid[k] * spsi[i]);
    c.pressure[k] = acc.value() / per.period;
  });
  return c;
}

}  // namespace tce
