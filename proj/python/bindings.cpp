#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "tcethermo/bridge.hpp"
#include "tcethermo/cli/config.hpp"
#include "tcethermo/cli/run.hpp"
#include "tcethermo/errors.hpp"
#include "tcethermo/ldp.hpp"
#include "tcethermo/parallel.hpp"
#include "tcethermo/pressure.hpp"
#include "tcethermo/sft.hpp"

namespace py = pybind11;
using namespace tce;

namespace {

py::object to_py(const SpherePoint& z) {
  if (z.is_infinity()) return py::none();
  return py::cast(z.value());
}

SpherePoint from_py(const py::object& o) {
  if (o.is_none()) return SpherePoint::infinity();
  return SpherePoint(o.cast<Complex>());
}

py::list points(const std::vector<SpherePoint>& zs) {
  py::list out;
  for (const SpherePoint& z : zs) out.append(to_py(z));
  return out;
}

}  // namespace

PYBIND11_MODULE(_tcethermo, m) {
  m.doc() = "Thermodynamic formalism for rational maps of the Riemann sphere";

  py::register_exception<ConfigInvalid>(m, "ConfigInvalid", PyExc_ValueError);
  py::register_exception<InvalidMap>(m, "InvalidMap", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<EmptySelection>(m, "EmptySelection", PyExc_ValueError);
  py::register_exception<NonConvexCurve>(m, "NonConvexCurve", PyExc_ValueError);
  py::register_exception<Reducible>(m, "Reducible", PyExc_ValueError);
  py::register_exception<DepthTooLarge>(m, "DepthTooLarge", PyExc_ValueError);
  py::register_exception<CriticalOnJulia>(m, "CriticalOnJulia", PyExc_ValueError);

  m.def("set_thread_count", &set_thread_count, py::arg("count"));

  py::class_<RationalMap>(m, "RationalMap")
      .def_static("polynomial", &RationalMap::polynomial, py::arg("coefficients"),
                  "Polynomial with coefficients in ascending powers.")
      .def_static("rational", &RationalMap::rational, py::arg("numerator"), py::arg("denominator"))
      .def_property_readonly("degree", &RationalMap::degree)
      .def_property_readonly("is_polynomial", &RationalMap::is_polynomial)
      .def("__call__", [](const RationalMap& f, const py::object& z) { return to_py(eval(f, from_py(z))); })
      .def("preimages", [](const RationalMap& f, const py::object& z) {
        py::list out;
        for (const Preimage& p : preimages(f, from_py(z))) out.append(py::make_tuple(to_py(p.point), p.multiplicity));
        return out;
      });

  m.def("repelling_fixed_point", [](const RationalMap& f) { return to_py(repelling_fixed_point(f)); });

  py::class_<Observable>(m, "Observable")
      .def_static("constant", &Observable::constant)
      .def_static("re_poly", &Observable::re_poly)
      .def_static("im_poly", &Observable::im_poly)
      .def_static("neg_t_log_deriv", &Observable::neg_t_log_deriv)
      .def_static("arc_indicator", &Observable::arc_indicator, py::arg("start"), py::arg("end"), py::arg("width"))
      .def_static("symbol_frequency", &symbol_frequency, py::arg("width") = 1e-8)
      .def_static("symbol_potential", &symbol_potential, py::arg("a"), py::arg("b"), py::arg("width") = 1e-8)
      .def("with_name", &Observable::with_name)
      .def_property_readonly("name", &Observable::name)
      .def("__call__", [](const Observable& o, const RationalMap& f, const py::object& z) { return o(f, from_py(z)); });

  m.def("birkhoff_sum", [](const RationalMap& f, const Observable& o, const py::object& x, int n) {
    return birkhoff_sum(f, o, from_py(x), n);
  });

  m.def(
      "pressure_tree",
      [](const RationalMap& f, const Observable& phi, const py::object& x0, int n) {
        return pressure_tree(f, phi, from_py(x0), n).value;
      },
      py::arg("map"), py::arg("phi"), py::arg("x0"), py::arg("n"), "(1/n) log L_phi^n 1(x0).");
  m.def(
      "pressure_periodic",
      [](const RationalMap& f, const Observable& phi, int n) {
        return pressure_periodic(f, phi, n, JuliaCloud::adaptive(f)).value;
      },
      py::arg("map"), py::arg("phi"), py::arg("n"));
  m.def(
      "log_eigenvalue",
      [](const RationalMap& f, const Observable& phi, const py::object& x0, int n) {
        return log_eigenvalue(f, phi, from_py(x0), n);
      },
      py::arg("map"), py::arg("phi"), py::arg("x0"), py::arg("n") = 20);
  m.def(
      "conformal_atoms",
      [](const RationalMap& f, const Observable& phi, const py::object& x0, int n) {
        const AtomicMeasure a = conformal_atoms(f, phi, from_py(x0), n);
        return py::make_tuple(points(a.atoms), a.weights);
      },
      py::arg("map"), py::arg("phi"), py::arg("x0"), py::arg("n"), "(atoms, weights) of the depth-n conformal measure.");
  m.def(
      "pressure_curve",
      [](const RationalMap& f, const Observable& phi, const Observable& psi, const std::vector<double>& q,
         const py::object& x0, int n) { return pressure_curve_tree(f, phi, psi, q, from_py(x0), n).pressure; },
      py::arg("map"), py::arg("phi"), py::arg("psi"), py::arg("q"), py::arg("x0"), py::arg("n"));
  m.def(
      "rate_function",
      [](const std::vector<double>& q, const std::vector<double>& pressure, const std::vector<double>& s) {
        PressureCurve c;
        c.q = q;
        c.pressure = pressure;
        std::vector<double> out;
        for (const ExtReal& v : rate_from_curve(c, s).rate) out.push_back(v.value());
        return out;
      },
      py::arg("q"), py::arg("pressure"), py::arg("s"), "Legendre conjugate of a sampled pressure curve; inf marks unresolved s.");
  m.def(
      "preimage_tail",
      [](const RationalMap& f, const Observable& phi, const Observable& psi, const py::object& x0, int n, double s) {
        const Observable named = psi.name().empty() ? psi.with_name("psi") : psi;
        const EmpiricalEnsemble e = preimage_ensemble(f, phi, {named}, from_py(x0), n);
        return level1_tail(e, named.name(), {ThresholdKind::AtLeast, s}).value();
      },
      py::arg("map"), py::arg("phi"), py::arg("psi"), py::arg("x0"), py::arg("n"), py::arg("s"),
      "(1/n) log of the preimage-ensemble mass with S_n(psi)/n >= s.");

  m.def("itinerary", [](const py::object& z, int n) { return itinerary(from_py(z), n); });

  py::class_<WeightedSft>(m, "WeightedSft")
      .def(py::init([](const Eigen::MatrixXi& allowed, const Eigen::MatrixXd& potential) {
             WeightedSft s{allowed, potential};
             s.validate();
             return s;
           }),
           py::arg("allowed"), py::arg("potential"))
      .def_readonly("allowed", &WeightedSft::allowed)
      .def_readonly("potential", &WeightedSft::potential)
      .def_property_readonly("alphabet", &WeightedSft::alphabet)
      .def("pressure", &sft_pressure)
      .def("equilibrium", [](const WeightedSft& s) {
        const MarkovMeasure mu = sft_equilibrium(s);
        return py::make_tuple(mu.p, mu.pi);
      })
      .def("entropy", [](const WeightedSft& s) { return sft_entropy(sft_equilibrium(s)); })
      .def("qstar", [](const WeightedSft& s, const Eigen::MatrixXd& pi) {
        return sft_Qstar(s, markov_from_transition(pi));
      });
  m.def("random_sft", [](std::uint64_t seed, int max_alphabet, double spread) {
    std::mt19937_64 rng(seed);
    return random_sft(rng, max_alphabet, spread);
  }, py::arg("seed"), py::arg("max_alphabet") = 5, py::arg("spread") = 1.0);
  m.def("sft_exact_tail", [](double a, double b, int n, double s) { return sft_exact_tail(a, b, n, s).value(); });
  m.def("bernoulli_rate", &bernoulli_rate, py::arg("p"), py::arg("s"));

  m.def(
      "run_config",
      [](const std::string& config_json, const std::string& out, unsigned threads) {
        const cli::ExperimentConfig c = cli::parse_config(nlohmann::json::parse(config_json));
        cli::RunOptions o;
        o.threads = threads;
        if (!out.empty()) o.out = out;
        std::ostringstream log;
        const int status = cli::run_experiment(c, o, log);
        return py::make_tuple(status, log.str());
      },
      py::arg("config_json"), py::arg("out") = "", py::arg("threads") = 0,
      "Runs an experiment config; returns (status, summary text).");
  m.attr("__version__") = cli::kToolVersion;
}
