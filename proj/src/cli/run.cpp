#include "tcethermo/cli/run.hpp"

#include <chrono>
#include <deque>
#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "tcethermo/bridge.hpp"
#include "tcethermo/csv.hpp"
#include "tcethermo/errors.hpp"
#include "tcethermo/ldp.hpp"
#include "tcethermo/parallel.hpp"
#include "tcethermo/sft.hpp"

namespace tce::cli {

using nlohmann::json;

namespace {

// Named stages with wall time and error capture; a failing stage is
// recorded and the run continues with the next one.
class Stages {
 public:
  explicit Stages(std::ostream& log) : log_(log) {}

  void run(const std::string& name, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    json rec = {{"name", name}, {"status", "ok"}};
    try {
      body();
    } catch (const std::exception& e) {
      rec["status"] = "error";
      rec["error"] = e.what();
      ++errors_;
      log_ << "stage " << name << " failed: " << e.what() << '\n';
    }
    rec["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    records_.push_back(std::move(rec));
  }

  int errors() const { return errors_; }
  const json& records() const { return records_; }

 private:
  std::ostream& log_;
  json records_ = json::array();
  int errors_ = 0;
};

struct Outputs {
  std::deque<std::pair<std::string, CsvTable>> tables;  // stable references
  std::vector<std::string> summary;

  CsvTable& table(const std::string& file, std::vector<std::string> header) {
    for (auto& [name, t] : tables) {
      if (name == file) return t;
    }
    tables.emplace_back(file, CsvTable(std::move(header)));
    return tables.back().second;
  }
  void line(const std::string& s) { summary.push_back(s); }
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(ExtReal v) { return format_double(v.value()); }

// Shared lazily built objects of one run.
class Context {
 public:
  Context(const ExperimentConfig& c, std::uint64_t seed) : cfg(c), map(*c.map), seed(seed) {}

  const ExperimentConfig& cfg;
  const RationalMap& map;
  std::uint64_t seed;

  const JuliaCloud& cloud() {
    if (!cloud_) {
      cloud_ = std::make_unique<JuliaCloud>(JuliaCloud::adaptive(map, cfg.tolerances.at("julia_resolution"),
                                                                 1u << 23, 8.0, cfg.solver_options()));
    }
    return *cloud_;
  }

  PeriodicOptions periodic_options() const {
    PeriodicOptions o;
    o.tree = cfg.tree_options();
    o.dedup_radius = cfg.tolerances.at("dedup_radius");
    o.min_multiplier = cfg.tolerances.at("min_multiplier");
    o.julia_delta = cfg.tolerances.at("julia_delta");
    return o;
  }

  SpherePoint point(const char* key) const {
    const json& v = cfg.params.contains(key) ? cfg.params.at(key) : json();
    if (v.is_null()) return repelling_fixed_point(map, cfg.solver_options());
    return parse_point(v, std::string("params.") + key);
  }

  double log_lambda(const Observable& phi, const SpherePoint& x0) const {
    return log_eigenvalue(map, phi, x0, cfg.params.value("eigen_depth", 20), cfg.tree_options());
  }

  AtomicMeasure equilibrium(int depth, int cesaro, const SpherePoint& x0) const {
    return equilibrium_atoms(map, cfg.potential, x0, depth, log_lambda(cfg.potential, x0), cesaro, cfg.tree_options());
  }

 private:
  std::unique_ptr<JuliaCloud> cloud_;
};

void point_cells(std::vector<CsvCell>& row, const SpherePoint& z) {
  if (z.is_infinity()) {
    row.emplace_back(INFINITY);
    row.emplace_back(0.0);
  } else {
    row.emplace_back(z.value().real());
    row.emplace_back(z.value().imag());
  }
}

std::vector<double> q_grid(const json& spec) {
  const double lo = spec.at("q_min").get<double>();
  const double hi = spec.at("q_max").get<double>();
  const double step = spec.at("q_step").get<double>();
  const long first = std::lround(lo / step);
  const long last = std::lround(hi / step);
  std::vector<double> q;
  for (long k = first; k <= last; ++k) q.push_back(k == 0 ? 0.0 : k * step);
  return q;
}

void run_pressure(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const SpherePoint x0 = ctx.point("x0");
  CsvTable& t = out.table("pressure.csv", {"n", "method", "value", "support"});
  for (int n : c.depths) {
    for (const json& m : c.params["methods"]) {
      const std::string method = m.get<std::string>();
      st.run("pressure " + method + " n=" + std::to_string(n), [&] {
        PressureEstimate e;
        if (method == "tree") {
          e = pressure_tree(ctx.map, c.potential, x0, n, c.tree_options());
        } else if (method == "periodic") {
          e = pressure_periodic(ctx.map, c.potential, n, ctx.cloud(), ctx.periodic_options());
        } else if (method == "birkhoff") {
          // P(phi) = P(0) + Q_0(phi) with mu_0 the measure of maximal entropy
          const AtomicMeasure mu0 = conformal_atoms(ctx.map, Observable::constant(0.0), x0, n, c.tree_options());
          e = pressure_birkhoff(ctx.map, c.potential, mu0, n);
          e.value += std::log(static_cast<double>(ctx.map.degree()));
        } else {
          const BowenCloud bowen(ctx.map, x0, n + c.params["bowen_extra"].get<int>(), c.tree_options());
          e = pressure_separated(ctx.map, c.potential, bowen, c.params["eps"].get<double>(), n);
        }
        t.add_row({std::int64_t{n}, method, e.value, static_cast<std::int64_t>(e.support)});
        out.line("pressure n=" + std::to_string(n) + " " + method + " = " + fmt(e.value));
      });
    }
  }
  if (!c.params["curve"].is_null()) {
    const json& cv = c.params["curve"];
    const int n = c.depths.back();
    st.run("pressure curve n=" + std::to_string(n), [&] {
      const PressureCurve curve = pressure_curve_tree(ctx.map, c.potential, c.observable(cv["observable"]), q_grid(cv),
                                                      x0, n, c.tree_options());
      CsvTable& ct = out.table("pressure_curve.csv", {"q", "pressure"});
      for (std::size_t k = 0; k < curve.q.size(); ++k) ct.add_row({curve.q[k], curve.pressure[k]});
      out.line("pressure curve min second difference = " + fmt(curve.min_second_difference()));
    });
  }
}

void run_equilibrium(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const SpherePoint x0 = ctx.point("x0");
  double log_p = 0.0;
  st.run("eigenvalue", [&] {
    log_p = ctx.log_lambda(c.potential, x0);
    out.line("log eigenvalue = " + fmt(log_p));
  });
  for (int n : c.depths) {
    st.run("equilibrium n=" + std::to_string(n), [&] {
      const AtomicMeasure eta = conformal_atoms(ctx.map, c.potential, x0, n, c.tree_options());
      const AtomicMeasure mu = equilibrium_atoms(ctx.map, c.potential, x0, n, log_p,
                                                 c.params["cesaro_depth"].get<int>(), c.tree_options());
      CsvTable& at = out.table("atoms_n" + std::to_string(n) + ".csv", {"re", "im", "conformal", "equilibrium"});
      for (std::size_t i = 0; i < eta.size(); ++i) {
        std::vector<CsvCell> row;
        point_cells(row, eta.atoms[i]);
        row.emplace_back(eta.weights[i]);
        row.emplace_back(mu.weights[i]);
        at.add_row(std::move(row));
      }
      CsvTable& dt = out.table("dual.csv", {"n", "observable", "transfer_side", "eigen_side", "invariance"});
      for (const Observable& g : c.observables) {
        const DualPair d = dual_identity(ctx.map, eta, c.potential, g, log_p, c.solver_options());
        const double inv = mu.integrate_pushforward(ctx.map, g) - mu.integrate(ctx.map, g);
        dt.add_row({std::int64_t{n}, g.name(), d.transfer_side, d.eigen_side, inv});
      }
      if (!c.params["arc"].is_null()) {
        const double r = conformality_ratio(ctx.map, eta, c.potential, log_p, c.params["arc"][0].get<double>(),
                                            c.params["arc"][1].get<double>());
        out.table("conformality.csv", {"n", "ratio", "tolerance"})
            .add_row({std::int64_t{n}, r, 2.0 / std::sqrt(static_cast<double>(eta.size()))});
        out.line("conformality ratio n=" + std::to_string(n) + " = " + fmt(r));
      }
    });
  }
}

void run_rpf(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const std::vector<SpherePoint> sample =
      julia_sample(ctx.map, c.params["sample_size"].get<int>(), ctx.seed, c.solver_options());
  double log_p = 0.0;
  st.run("eigenvalue", [&] {
    log_p = ctx.log_lambda(c.potential, repelling_fixed_point(ctx.map, c.solver_options()));
    out.line("log eigenvalue = " + fmt(log_p));
  });
  CsvTable& t = out.table("rpf.csv", {"n", "eigen_residual", "c0_bound", "invariance_residual", "density_ratio"});
  for (int n : c.depths) {
    st.run("rpf n=" + std::to_string(n), [&] {
      RpfOptions o;
      o.cesaro_depth = c.params["cesaro_depth"].get<int>();
      o.tree = c.tree_options();
      const RpfResiduals r = rpf_residuals(ctx.map, c.potential, sample, n, log_p, o);
      t.add_row({std::int64_t{n}, r.eigen_residual, r.c0_bound, r.invariance_residual, r.density.ratio_bound});
      out.line("rpf n=" + std::to_string(n) + " eigen " + fmt(r.eigen_residual) + " C0 " + fmt(r.c0_bound) +
               " invariance " + fmt(r.invariance_residual));
      if (n == c.depths.back()) {
        CsvTable& dt = out.table("density.csv", {"re", "im", "h"});
        for (std::size_t i = 0; i < r.density.points.size(); ++i) {
          std::vector<CsvCell> row;
          point_cells(row, r.density.points[i]);
          row.emplace_back(r.density.values[i]);
          dt.add_row(std::move(row));
        }
      }
    });
  }
}

EnsembleSource parse_source(const std::string& s) {
  if (s == "periodic") return EnsembleSource::Periodic;
  if (s == "preimage") return EnsembleSource::Preimage;
  return EnsembleSource::Birkhoff;
}

EmpiricalEnsemble build(Context& ctx, EnsembleSource source, const std::vector<Observable>& obs, int n,
                        const SpherePoint& x0) {
  const ExperimentConfig& c = ctx.cfg;
  switch (source) {
    case EnsembleSource::Periodic:
      return periodic_ensemble(ctx.map, c.potential, obs,
                               periodic_points(ctx.map, n, ctx.cloud(), ctx.periodic_options()));
    case EnsembleSource::Preimage:
      return preimage_ensemble(ctx.map, c.potential, obs, x0, n, c.tree_options());
    case EnsembleSource::Birkhoff:
      // atoms at depth n so that no orbit runs into the forward orbit of x0
      return birkhoff_ensemble(ctx.map, obs, ctx.equilibrium(n, c.params.value("cesaro_depth", 6), x0), n);
  }
  throw InvalidArgument("unknown ensemble source");
}

Threshold parse_threshold(const json& t) {
  const std::string k = t["kind"].get<std::string>();
  const double v = t["value"].get<double>();
  if (k == ">") return {ThresholdKind::Above, v};
  if (k == "<") return {ThresholdKind::Below, v};
  if (k == "|>|") return {ThresholdKind::AbsAbove, v};
  return {ThresholdKind::AtLeast, v};
}

void run_ldp_level1(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const SpherePoint x0 = ctx.point("x0");
  const std::string name = c.params["observable"].get<std::string>();
  const Observable& psi = c.observable(name);
  CsvTable& t = out.table("ldp_level1.csv", {"n", "source", "observable", "threshold", "value", "tail", "rate_bound"});
  for (int n : c.depths) {
    std::unique_ptr<RateFunction> rate;
    if (!c.params["rate"].is_null()) {
      st.run("rate n=" + std::to_string(n), [&] {
        const PressureCurve curve =
            pressure_curve_tree(ctx.map, c.potential, psi, q_grid(c.params["rate"]), x0, n, c.tree_options());
        std::vector<double> s_grid;
        for (const json& th : c.params["thresholds"]) s_grid.push_back(th["value"].get<double>());
        for (const json& th : c.params["thresholds"]) s_grid.push_back(-th["value"].get<double>());
        // a fine grid between the thresholds so the infima see the minimum
        for (int k = -400; k <= 400; ++k) s_grid.push_back(k / 400.0 * std::max(1.0, std::abs(s_grid[0]) * 2));
        std::sort(s_grid.begin(), s_grid.end());
        rate = std::make_unique<RateFunction>(rate_from_curve(curve, s_grid, name, c.tolerances.at("convexity")));
      });
    }
    for (const json& src : c.params["sources"]) {
      const EnsembleSource source = parse_source(src.get<std::string>());
      st.run(std::string("ldp-level1 ") + source_name(source) + " n=" + std::to_string(n), [&] {
        const EmpiricalEnsemble e = build(ctx, source, {psi.with_name(name)}, n, x0);
        for (const json& th : c.params["thresholds"]) {
          const Threshold thr = parse_threshold(th);
          const ExtReal tail = level1_tail(e, name, thr);
          double bound = NAN;
          if (rate) {
            ExtReal r;
            switch (thr.kind) {
              case ThresholdKind::Above:
              case ThresholdKind::AtLeast:
                r = rate->upper_infimum(thr.value);
                break;
              case ThresholdKind::Below:
                r = rate->lower_infimum(thr.value);
                break;
              case ThresholdKind::AbsAbove:
                r = ExtReal(std::min(rate->upper_infimum(thr.value).value(), rate->lower_infimum(-thr.value).value()));
                break;
            }
            bound = -r.value();
          }
          t.add_row({std::int64_t{n}, source_name(source), name, th["kind"].get<std::string>(), thr.value, tail.value(),
                     bound});
          out.line("tail n=" + std::to_string(n) + " " + source_name(source) + " " + th["kind"].get<std::string>() +
                   " " + fmt(thr.value) + " = " + fmt(tail));
        }
      });
    }
  }
}

void run_ldp_level2(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const SpherePoint x0 = ctx.point("x0");
  std::vector<double> deltas;
  for (const json& d : c.params["deltas"]) deltas.push_back(d.get<double>());
  AtomicMeasure mu;
  st.run("equilibrium atoms", [&] { mu = ctx.equilibrium(c.params["atom_depth"].get<int>(), -1, x0); });
  std::vector<std::string> header = {"n", "source"};
  for (const Observable& o : c.observables) header.push_back("mass_" + o.name());
  header.push_back("joint_mass");
  CsvTable& t = out.table("weak_star.csv", header);
  if (mu.size() == 0) return;
  for (const json& src : c.params["sources"]) {
    const EnsembleSource source = parse_source(src.get<std::string>());
    for (int n : c.depths) {
      st.run(std::string("weak-star ") + source_name(source) + " n=" + std::to_string(n), [&] {
        std::vector<EmpiricalEnsemble> es;
        es.push_back(build(ctx, source, c.observables, n, x0));
        for (const WeakStarRow& r : weak_star_check(es, ctx.map, c.observables, deltas, mu)) {
          std::vector<CsvCell> row = {std::int64_t{r.n}, std::string(source_name(source))};
          for (double m : r.single_mass) row.emplace_back(m);
          row.emplace_back(r.joint_mass);
          t.add_row(std::move(row));
          out.line(std::string("weak-star ") + source_name(source) + " n=" + std::to_string(n) + " joint mass " +
                   fmt(r.joint_mass));
        }
      });
    }
  }
}

void run_rate(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const json& p = c.params;
  const SpherePoint x0 = ctx.point("x0");
  const std::string name = p["observable"].get<std::string>();
  const Observable& psi = c.observable(name);
  const std::vector<double> q = q_grid(p);
  std::vector<double> s_grid;
  const int count = p["s_count"].get<int>();
  for (int k = 0; k < count; ++k) {
    s_grid.push_back(p["s_min"].get<double>() + (p["s_max"].get<double>() - p["s_min"].get<double>()) * k / (count - 1));
  }
  for (int n : c.depths) {
    st.run("rate n=" + std::to_string(n), [&] {
      const PressureCurve curve =
          p["method"] == "tree"
              ? pressure_curve_tree(ctx.map, c.potential, psi, q, x0, n, c.tree_options())
              : pressure_curve_periodic(ctx.map, c.potential, psi, q,
                                        periodic_points(ctx.map, n, ctx.cloud(), ctx.periodic_options()));
      const RateFunction r = rate_from_curve(curve, s_grid, name, c.tolerances.at("convexity"));
      CsvTable& ct = out.table("pressure_curve.csv", {"n", "q", "pressure"});
      for (std::size_t k = 0; k < curve.q.size(); ++k) ct.add_row({std::int64_t{n}, curve.q[k], curve.pressure[k]});
      CsvTable& rt = out.table("rate.csv", {"n", "s", "rate"});
      for (std::size_t k = 0; k < r.s.size(); ++k) rt.add_row({std::int64_t{n}, r.s[k], r.rate[k].value()});
      out.line("rate n=" + std::to_string(n) + " argmin " + fmt(r.argmin()) + " min second difference " +
               fmt(r.min_second_difference()));
    });
  }
  st.run("equilibrium mean", [&] {
    const AtomicMeasure mu = ctx.equilibrium(p["atom_depth"].get<int>(), -1, x0);
    out.line("equilibrium mean of " + name + " = " + fmt(mu.integrate(ctx.map, psi)));
  });
}

void run_entropy_local(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const SpherePoint x0 = ctx.point("x0");
  std::vector<Constraint> base;
  st.run("constraint centers", [&] {
    std::unique_ptr<AtomicMeasure> mu;
    for (const json& k : c.params["constraints"]) {
      Constraint con{k["observable"].get<std::string>(), 0.0, k["delta"].get<double>()};
      if (k["center"].is_number()) {
        con.center = k["center"].get<double>();
      } else {
        if (!mu) mu = std::make_unique<AtomicMeasure>(ctx.equilibrium(c.params["atom_depth"].get<int>(), -1, x0));
        con.center = mu->integrate(ctx.map, c.observable(con.observable));
      }
      base.push_back(con);
    }
  });
  if (base.size() != c.params["constraints"].size()) return;
  CsvTable& t = out.table("entropy_local.csv", {"n", "delta_scale", "value"});
  const EnsembleSource source = parse_source(c.params["source"].get<std::string>());
  for (int n : c.depths) {
    st.run("entropy-local n=" + std::to_string(n), [&] {
      const EmpiricalEnsemble e = build(ctx, source, c.observables, n, x0);
      for (const json& sc : c.params["delta_scales"]) {
        std::vector<Constraint> cons = base;
        for (Constraint& k : cons) k.delta *= sc.get<double>();
        double v = -INFINITY;
        try {
          v = entropy_local_pressure(e, cons);
        } catch (const EmptySelection&) {
          // reported as -inf: an empty weighted sum, not a small one
        }
        t.add_row({std::int64_t{n}, sc.get<double>(), v});
        out.line("entropy-local n=" + std::to_string(n) + " scale " + fmt(sc.get<double>()) + " = " + fmt(v));
      }
    });
  }
}

void run_esc(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const SpherePoint x = ctx.point("x");
  CsvTable& t = out.table("esc.csv", {"n_max", "depth", "diameter"});
  CsvTable& rt = out.table("esc_rate.csv", {"n_max", "rate", "probes"});
  for (int n : c.depths) {
    st.run("esc n_max=" + std::to_string(n), [&] {
      const EscReport r = esc_diagnostic(ctx.map, x, c.params["r0"].get<double>(), n, c.params["probes"].get<int>(),
                                         ctx.cloud(), c.tree_options());
      for (std::size_t k = 0; k < r.diameters.size(); ++k) {
        t.add_row({std::int64_t{n}, static_cast<std::int64_t>(k), r.diameters[k]});
      }
      rt.add_row({std::int64_t{n}, r.rate, static_cast<std::int64_t>(r.probes)});
      out.line("esc n_max=" + std::to_string(n) + " shrink rate " + fmt(r.rate));
    });
  }
}

WeightedSft parse_sft(const json& s) {
  WeightedSft w;
  const json& a = s["allowed"];
  const json& p = s["potential"];
  if (!a.is_array() || !p.is_array() || a.size() != p.size() || a.empty()) {
    throw ConfigInvalid("params.shifts: allowed and potential must be square arrays of the same size");
  }
  const int m = static_cast<int>(a.size());
  w.allowed.resize(m, m);
  w.potential.resize(m, m);
  for (int i = 0; i < m; ++i) {
    if (!a[i].is_array() || !p[i].is_array() || static_cast<int>(a[i].size()) != m ||
        static_cast<int>(p[i].size()) != m) {
      throw ConfigInvalid("params.shifts: rows must have length " + std::to_string(m));
    }
    for (int j = 0; j < m; ++j) {
      w.allowed(i, j) = a[i][j].get<int>();
      w.potential(i, j) = p[i][j].get<double>();
    }
  }
  w.validate();
  return w;
}

void run_sft(const ExperimentConfig& c, std::uint64_t seed, Stages& st, Outputs& out) {
  std::vector<WeightedSft> shifts;
  std::mt19937_64 rng(seed);
  st.run("sft setup", [&] {
    for (const json& s : c.params["shifts"]) shifts.push_back(parse_sft(s));
    for (int k = 0; k < c.params["count"].get<int>(); ++k) {
      shifts.push_back(random_sft(rng, c.params["max_alphabet"].get<int>(), c.params["spread"].get<double>()));
    }
  });
  CsvTable& t = out.table("sft.csv", {"index", "alphabet", "pressure", "entropy", "integral", "variational_residual",
                                      "qstar_equilibrium", "gateaux_identity", "gateaux_derivative"});
  double worst_var = 0.0, worst_q = 0.0, worst_id = 0.0, worst_fd = 0.0;
  st.run("sft oracle", [&] {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      const WeightedSft& s = shifts[i];
      const double p = sft_pressure(s);
      const MarkovMeasure mu = sft_equilibrium(s);
      const double h = sft_entropy(mu);
      const double integral = sft_integral(s.potential, mu);
      const double q = sft_Qstar(s, mu);
      Eigen::MatrixXd psi(s.alphabet(), s.alphabet());
      for (int a = 0; a < s.alphabet(); ++a) {
        for (int b = 0; b < s.alphabet(); ++b) psi(a, b) = u(rng);
      }
      const GateauxResiduals g = sft_gateaux_check(s, psi);
      t.add_row({static_cast<std::int64_t>(i), std::int64_t{s.alphabet()}, p, h, integral, p - h - integral, q,
                 g.identity, g.derivative});
      worst_var = std::max(worst_var, std::abs(p - h - integral));
      worst_q = std::max(worst_q, std::abs(q));
      worst_id = std::max(worst_id, g.identity);
      worst_fd = std::max(worst_fd, g.derivative);
    }
  });
  out.line("sft shifts " + std::to_string(shifts.size()) + ": max |P - h - int phi| " + fmt(worst_var) +
           ", max |Q*(eq)| " + fmt(worst_q) + ", max gateaux " + fmt(worst_id) + ", max derivative " + fmt(worst_fd));
  if (!c.params["tail"].is_null()) {
    const json& tl = c.params["tail"];
    st.run("sft tails", [&] {
      CsvTable& tt = out.table("sft_tail.csv", {"n", "s", "tail", "minus_rate"});
      const double a = tl["a"].get<double>(), b = tl["b"].get<double>();
      const double p1 = std::exp(b) / (std::exp(a) + std::exp(b));
      for (const json& nj : tl["n"]) {
        for (const json& sj : tl["s"]) {
          const int n = nj.get<int>();
          const double s = sj.get<double>();
          // inf over s' >= s of the Bernoulli rate sits at max(s, p1)
          const double bound = -bernoulli_rate(p1, std::max(s, p1));
          const ExtReal tail = sft_exact_tail(a, b, n, s);
          tt.add_row({std::int64_t{n}, s, tail.value(), bound});
          out.line("exact tail n=" + std::to_string(n) + " s=" + fmt(s) + " = " + fmt(tail));
        }
      }
    });
  }
}

void run_bridge(Context& ctx, Stages& st, Outputs& out) {
  const ExperimentConfig& c = ctx.cfg;
  const double a = c.params["a"].get<double>(), b = c.params["b"].get<double>();
  const double width = c.params["width"].get<double>();
  const SpherePoint x0(std::polar(1.0, 2.0 * std::numbers::pi / 3.0));
  const Observable phi = symbol_potential(a, b, width);
  const Observable freq = symbol_frequency(width);
  CsvTable& t = out.table("bridge.csv", {"n", "members", "excluded", "bijective", "max_weight_error",
                                         "max_frequency_error"});
  CsvTable& tt = out.table("bridge_tails.csv", {"n", "s", "ensemble_tail", "exact_tail", "difference"});
  for (int n : c.depths) {
    st.run("bridge n=" + std::to_string(n), [&] {
      const EmpiricalEnsemble e = preimage_ensemble(ctx.map, phi, {freq}, x0, n, c.tree_options());
      const BridgeReport r = bridge_validate(e, a, b, freq.name(), c.tolerances.at("boundary"));
      t.add_row({std::int64_t{n}, static_cast<std::int64_t>(r.members), static_cast<std::int64_t>(r.excluded),
                 std::int64_t{r.bijective ? 1 : 0}, r.max_weight_error, r.max_frequency_error});
      for (const json& sj : c.params["s"]) {
        const double s = sj.get<double>();
        const ExtReal et = level1_tail(e, freq.name(), {ThresholdKind::AtLeast, s});
        const ExtReal ex = sft_exact_tail(a, b, n, s);
        tt.add_row({std::int64_t{n}, s, et.value(), ex.value(), et.value() - ex.value()});
      }
      out.line("bridge n=" + std::to_string(n) + (r.bijective ? " bijective" : " NOT bijective") +
               ", max weight error " + fmt(r.max_weight_error));
    });
  }
}

json tolerances_json(const ExperimentConfig& c) {
  json t = json::object();
  for (const auto& [k, v] : c.tolerances) t[k] = v;
  return t;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  if (options.threads > 0) set_thread_count(options.threads);
  const std::uint64_t seed = options.seed.value_or(config.seed);
  const std::string dir = options.out.value_or(config.output);
  std::filesystem::create_directories(dir);

  Stages st(log);
  Outputs out;
  const auto t0 = std::chrono::steady_clock::now();
  if (config.kind == ExperimentKind::SftOracle) {
    run_sft(config, seed, st, out);
  } else {
    Context ctx(config, seed);
    switch (config.kind) {
      case ExperimentKind::Pressure:
        run_pressure(ctx, st, out);
        break;
      case ExperimentKind::Equilibrium:
        run_equilibrium(ctx, st, out);
        break;
      case ExperimentKind::Rpf:
        run_rpf(ctx, st, out);
        break;
      case ExperimentKind::LdpLevel1:
        run_ldp_level1(ctx, st, out);
        break;
      case ExperimentKind::LdpLevel2:
        run_ldp_level2(ctx, st, out);
        break;
      case ExperimentKind::Rate:
        run_rate(ctx, st, out);
        break;
      case ExperimentKind::EntropyLocal:
        run_entropy_local(ctx, st, out);
        break;
      case ExperimentKind::Esc:
        run_esc(ctx, st, out);
        break;
      case ExperimentKind::BridgeValidate:
        run_bridge(ctx, st, out);
        break;
      case ExperimentKind::SftOracle:
        break;
    }
  }

  json files = json::array();
  for (const auto& [name, table] : out.tables) {
    table.write((std::filesystem::path(dir) / name).string());
    files.push_back(name);
  }
  std::ostringstream summary;
  summary << "tcethermo " << kToolVersion << "  " << kind_name(config.kind) << "  seed " << seed << '\n';
  for (const std::string& line : out.summary) summary << line << '\n';
  summary << (st.errors() ? std::to_string(st.errors()) + " stage(s) failed" : std::string("all stages ok")) << '\n';
  write_file_atomic((std::filesystem::path(dir) / "summary.txt").string(), summary.str());
  files.push_back("summary.txt");
  log << summary.str();

  json manifest = {
      {"tool", "tcethermo"},
      {"version", kToolVersion},
      {"kind", kind_name(config.kind)},
      {"config_hash", config_hash(config.raw)},
      {"config", config.raw},
      {"seed", seed},
      {"threads", thread_count()},
      {"tolerances", tolerances_json(config)},
      {"params", config.params},
      {"depths", config.depths},
      {"stages", st.records()},
      {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
      {"outputs", files},
      {"errors", st.errors()},
  };
  write_file_atomic((std::filesystem::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  return st.errors() ? 1 : 0;
}

std::string ValidationReport::text() const {
  std::ostringstream s;
  for (const std::string& e : errors) s << "error: " << e << '\n';
  for (const std::string& w : warnings) s << "warning: " << w << '\n';
  if (ok()) s << "ok (estimated atoms " << estimated_atoms << ")\n";
  return s.str();
}

ValidationReport validate_config(const ExperimentConfig& c) {
  ValidationReport r;
  if (c.kind == ExperimentKind::SftOracle) {
    r.estimated_atoms = 0;
    return r;
  }
  const double budget = c.tolerances.at("atom_budget");
  int depth = 0;
  for (int n : c.depths) depth = std::max(depth, n);
  if (c.kind == ExperimentKind::Pressure) depth += c.params["bowen_extra"].get<int>();
  for (const char* key : {"eigen_depth", "atom_depth"}) {
    if (c.params.contains(key)) depth = std::max(depth, c.params[key].get<int>());
  }
  const double atoms = std::pow(static_cast<double>(c.map->degree()), depth);
  r.estimated_atoms = atoms > 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(atoms);
  if (atoms > budget) {
    std::ostringstream m;
    m << "depth " << depth << " on a degree-" << c.map->degree() << " map needs " << atoms
      << " atoms, over the budget of " << static_cast<std::uint64_t>(budget);
    r.errors.push_back(m.str());
  }
  std::vector<const Observable*> potentials = {&c.potential};
  for (const Observable& o : c.observables) potentials.push_back(&o);
  bool needs_guard = false;
  for (const Observable* o : potentials) needs_guard = needs_guard || o->uses_log_derivative();
  if (needs_guard) {
    const JuliaCloud cloud = JuliaCloud::from_tree(*c.map, 10, c.solver_options());
    for (const Observable* o : potentials) {
      if (!o->uses_log_derivative()) continue;
      try {
        check_critical_guard(*c.map, *o, cloud);
      } catch (const CriticalOnJulia& e) {
        r.warnings.push_back("potential '" + o->name() + "' fails the critical-point guard: " + e.what());
      }
    }
  }
  return r;
}

ExperimentConfig default_oracle_config() {
  return parse_config({{"kind", "sft-oracle"}, {"seed", 1}, {"output", "oracle"},
                       {"params", {{"count", 100}, {"max_alphabet", 5}, {"tail", {{"a", 0.0}, {"b", 0.0}, {"n", {20}}, {"s", {0.55, 0.6, 0.7, 0.8}}}}}}});
}

}  // namespace tce::cli
