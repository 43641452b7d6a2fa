#include "tcethermo/ldp.hpp"

#include <algorithm>
#include <cmath>

#include "tcethermo/errors.hpp"
#include "tcethermo/parallel.hpp"

namespace tce {

namespace {

std::vector<std::string> names_of(const std::vector<Observable>& observables) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < observables.size(); ++j) {
    names.push_back(observables[j].name().empty() ? "psi" + std::to_string(j) : observables[j].name());
  }
  return names;
}

// Normalizes raw log-weights in place and returns the log normalizer.
double normalize_log(std::vector<double>& w) {
  const double z = log_sum_exp(w);
  for (double& x : w) x -= z;
  return z;
}

// Forward Birkhoff sums of every observable along one orbit.
void orbit_sums(const RationalMap& map, const std::vector<Observable>& obs, const SpherePoint& x, int n,
                std::vector<std::vector<double>>& out, std::size_t slot) {
  std::vector<CompensatedSum> acc(obs.size());
  SpherePoint z = x;
  for (int k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < obs.size(); ++j) acc[j].add(obs[j](map, z));
    if (k + 1 < n) z = eval(map, z);
  }
  for (std::size_t j = 0; j < obs.size(); ++j) out[j][slot] = acc[j].value();
}

}  // namespace

const char* source_name(EnsembleSource s) {
  switch (s) {
    case EnsembleSource::Periodic:
      return "periodic";
    case EnsembleSource::Preimage:
      return "preimage";
    case EnsembleSource::Birkhoff:
      return "birkhoff";
  }
  return "?";
}

const std::vector<double>& EmpiricalEnsemble::sum_of(const std::string& name) const {
  for (std::size_t j = 0; j < observable_names.size(); ++j) {
    if (observable_names[j] == name) return sums[j];
  }
  throw UnknownObservable("'" + name + "' was not recorded in the ensemble");
}

EmpiricalEnsemble periodic_ensemble(const RationalMap& map, const Observable& phi,
                                    const std::vector<Observable>& observables, const PeriodicSet& per) {
  if (per.points.empty()) throw EmptyPeriodicSet("no periodic points of period " + std::to_string(per.period) + " on J");
  EmpiricalEnsemble e;
  e.source = EnsembleSource::Periodic;
  e.n = per.period;
  e.observable_names = names_of(observables);
  const std::size_t count = per.points.size();
  std::vector<Observable> all = observables;
  all.push_back(phi);
  std::vector<std::vector<double>> sums(all.size(), std::vector<double>(count));
  parallel_for(count, [&](std::size_t i) { orbit_sums(map, all, per.points[i].point, e.n, sums, i); });
  e.log_weights = std::move(sums.back());
  sums.pop_back();
  e.sums = std::move(sums);
  e.log_partition = normalize_log(e.log_weights);
  e.points.reserve(count);
  for (const PeriodicPoint& p : per.points) e.points.push_back(p.point);
  return e;
}

EmpiricalEnsemble preimage_ensemble(const RationalMap& map, const Observable& phi,
                                    const std::vector<Observable>& observables, const SpherePoint& x0, int n,
                                    const TreeOptions& opts) {
  std::vector<Observable> named;
  const std::vector<std::string> names = names_of(observables);
  for (std::size_t j = 0; j < observables.size(); ++j) named.push_back(observables[j].with_name(names[j]));
  PreimageTree tree = preimage_tree(map, phi, named, x0, n, opts);
  EmpiricalEnsemble e;
  e.source = EnsembleSource::Preimage;
  e.n = n;
  e.observable_names = names;
  e.log_weights.resize(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) e.log_weights[i] = tree.log_weight(i);
  e.log_partition = normalize_log(e.log_weights);
  e.points = std::move(tree.leaves);
  e.sums = std::move(tree.sums);
  return e;
}

EmpiricalEnsemble birkhoff_ensemble(const RationalMap& map, const std::vector<Observable>& observables,
                                    const AtomicMeasure& mu, int n) {
  if (n < 1) throw InvalidArgument("birkhoff_ensemble needs n >= 1");
  EmpiricalEnsemble e;
  e.source = EnsembleSource::Birkhoff;
  e.n = n;
  e.observable_names = names_of(observables);
  e.points = mu.atoms;
  e.log_weights.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    e.log_weights[i] = mu.weights[i] > 0.0 ? std::log(mu.weights[i]) : -INFINITY;
  }
  e.log_partition = normalize_log(e.log_weights);
  e.sums.assign(observables.size(), std::vector<double>(mu.size()));
  parallel_for(mu.size(), [&](std::size_t i) { orbit_sums(map, observables, mu.atoms[i], n, e.sums, i); });
  return e;
}

bool Threshold::accepts(double a) const {
  switch (kind) {
    case ThresholdKind::Above:
      return a > value;
    case ThresholdKind::Below:
      return a < value;
    case ThresholdKind::AbsAbove:
      return std::abs(a) > value;
    case ThresholdKind::AtLeast:
      return a >= value - 1e-12 * std::max(1.0, std::abs(value));
  }
  return false;
}

namespace {

template <class Pred>
ExtReal masked_log_mass(const EmpiricalEnsemble& e, const std::string& observable, Pred pred) {
  const std::vector<double>& s = e.sum_of(observable);
  LogSumExp acc;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (pred(s[i] / e.n)) acc.add(e.log_weights[i]);
  }
  return acc.empty() ? ExtReal::neg_inf() : ExtReal(acc.value());
}

}  // namespace

ExtReal log_mass(const EmpiricalEnsemble& e, const std::string& observable, const Threshold& t) {
  return masked_log_mass(e, observable, [&](double a) { return t.accepts(a); });
}

ExtReal log_band_mass(const EmpiricalEnsemble& e, const std::string& observable, double lo, double hi) {
  return masked_log_mass(e, observable, [&](double a) { return a >= lo && a < hi; });
}

ExtReal level1_tail(const EmpiricalEnsemble& e, const std::string& observable, const Threshold& t) {
  const ExtReal m = log_mass(e, observable, t);
  if (m.is_neg_inf()) return m;
  // a full selection returns exactly 0 rather than a rounding residue
  if (std::abs(m.value()) < 1e-13) return ExtReal(0.0);
  return ExtReal(m.value() / e.n);
}

RateFunction rate_from_curve(const PressureCurve& curve, const std::vector<double>& s_grid,
                             const std::string& observable, double convexity_tolerance) {
  if (curve.q.size() < 2) throw InvalidArgument("rate_from_curve needs at least two curve samples");
  if (!std::is_sorted(curve.q.begin(), curve.q.end())) throw InvalidArgument("curve q grid must be increasing");
  const double worst = curve.min_second_difference();
  if (worst < -convexity_tolerance) {
    throw NonConvexCurve("second difference " + std::to_string(worst) + " below -" +
                         std::to_string(convexity_tolerance));
  }
  const double p0 = curve.at_zero();
  const std::size_t k = curve.q.size();
  const double lo_slope = (curve.pressure[1] - curve.pressure[0]) / (curve.q[1] - curve.q[0]);
  const double hi_slope = (curve.pressure[k - 1] - curve.pressure[k - 2]) / (curve.q[k - 1] - curve.q[k - 2]);
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo_slope), std::abs(hi_slope)));

  RateFunction r;
  r.observable = observable;
  r.s = s_grid;
  r.curve = curve;
  r.rate.reserve(s_grid.size());
  for (double s : s_grid) {
    if (s < lo_slope - slack || s > hi_slope + slack) {
      r.rate.push_back(ExtReal::pos_inf());
      continue;
    }
    double best = -INFINITY;
    for (std::size_t i = 0; i < k; ++i) best = std::max(best, curve.q[i] * s - (curve.pressure[i] - p0));
    r.rate.push_back(ExtReal(best));
  }
  return r;
}

ExtReal RateFunction::upper_infimum(double s0) const {
  double best = INFINITY;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= s0 - 1e-12 && rate[i].finite()) best = std::min(best, rate[i].value());
  }
  return std::isinf(best) ? ExtReal::pos_inf() : ExtReal(best);
}

ExtReal RateFunction::lower_infimum(double s0) const {
  double best = INFINITY;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] <= s0 + 1e-12 && rate[i].finite()) best = std::min(best, rate[i].value());
  }
  return std::isinf(best) ? ExtReal::pos_inf() : ExtReal(best);
}

double RateFunction::argmin() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (rate[i].value() < rate[best].value()) best = i;
  }
  return s.at(best);
}

double RateFunction::min_second_difference() const {
  double worst = INFINITY;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!rate[i - 1].finite() || !rate[i].finite() || !rate[i + 1].finite()) continue;
    const double h1 = s[i] - s[i - 1];
    const double h2 = s[i + 1] - s[i];
    const double dd = 2.0 * ((rate[i + 1].value() - rate[i].value()) / h2 -
                             (rate[i].value() - rate[i - 1].value()) / h1) / (h1 + h2);
    worst = std::min(worst, dd * h1 * h2);
  }
  return worst;
}

double entropy_local_pressure(const EmpiricalEnsemble& e, const std::vector<Constraint>& constraints) {
  std::vector<const std::vector<double>*> cols;
  for (const Constraint& c : constraints) cols.push_back(&e.sum_of(c.observable));
  LogSumExp acc;
  for (std::size_t i = 0; i < e.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < constraints.size() && keep; ++j) {
      keep = std::abs((*cols[j])[i] / e.n - constraints[j].center) < constraints[j].delta;
    }
    if (keep) acc.add(e.log_weights[i]);
  }
  if (acc.empty()) throw EmptySelection("no ensemble member satisfies the constraints");
  return (e.log_partition + acc.value()) / e.n;
}

std::vector<WeakStarRow> weak_star_check(const std::vector<EmpiricalEnsemble>& ensembles,
                                         const RationalMap& map, const std::vector<Observable>& observables,
                                         const std::vector<double>& deltas, const AtomicMeasure& mu) {
  if (deltas.size() != observables.size()) throw InvalidArgument("one delta per observable");
  std::vector<double> centers;
  for (const Observable& o : observables) centers.push_back(mu.integrate(map, o));
  const std::vector<std::string> names = names_of(observables);

  std::vector<WeakStarRow> rows;
  for (const EmpiricalEnsemble& e : ensembles) {
    WeakStarRow row;
    row.n = e.n;
    row.source = e.source;
    std::vector<const std::vector<double>*> cols;
    for (const std::string& name : names) cols.push_back(&e.sum_of(name));
    std::vector<LogSumExp> single(names.size());
    LogSumExp joint;
    for (std::size_t i = 0; i < e.size(); ++i) {
      bool all = true;
      for (std::size_t j = 0; j < names.size(); ++j) {
        const bool in = std::abs((*cols[j])[i] / e.n - centers[j]) < deltas[j];
        if (in) single[j].add(e.log_weights[i]);
        all = all && in;
      }
      if (all) joint.add(e.log_weights[i]);
    }
    for (const LogSumExp& s : single) row.single_mass.push_back(std::exp(s.value()));
    row.joint_mass = std::exp(joint.value());
    rows.push_back(std::move(row));
  }
  return rows;
}

double weak_star_max_drop(const std::vector<WeakStarRow>& rows, int column) {
  double drop = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double a = column < 0 ? rows[i - 1].joint_mass : rows[i - 1].single_mass.at(column);
    const double b = column < 0 ? rows[i].joint_mass : rows[i].single_mass.at(column);
    drop = std::max(drop, a - b);
  }
  return drop;
}

}  // namespace tce
