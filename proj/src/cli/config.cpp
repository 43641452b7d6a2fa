#include "tcethermo/cli/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "tcethermo/bridge.hpp"
#include "tcethermo/errors.hpp"

namespace tce::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigInvalid(where + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where, "missing key '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Complex> coefficients(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a nonempty coefficient array");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (v[i].is_number()) {
      out.emplace_back(v[i].get<double>(), 0.0);
    } else if (v[i].is_array() && v[i].size() == 2) {
      out.emplace_back(number(v[i][0], at), number(v[i][1], at));
    } else {
      fail(at, "coefficient must be a number or [re, im]");
    }
  }
  return out;
}

// Default params per kind. A null default marks an optional structured
// value validated separately.
json default_params(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Pressure:
      return {{"methods", {"tree", "periodic", "birkhoff", "separated"}},
              {"x0", nullptr},
              {"eps", 1.9},
              {"bowen_extra", 3},
              {"curve", nullptr}};
    case ExperimentKind::Equilibrium:
      return {{"x0", nullptr}, {"eigen_depth", 20}, {"cesaro_depth", -1}, {"arc", nullptr}};
    case ExperimentKind::Rpf:
      return {{"sample_size", 16}, {"cesaro_depth", 10}, {"eigen_depth", 20}};
    case ExperimentKind::LdpLevel1:
      return {{"x0", nullptr},
              {"cesaro_depth", 6},
              {"eigen_depth", 20},
              {"sources", {"periodic", "preimage", "birkhoff"}},
              {"observable", ""},
              {"thresholds", json::array({{{"kind", ">="}, {"value", 0.7}}})},
              {"rate", nullptr}};
    case ExperimentKind::LdpLevel2:
      return {{"x0", nullptr},    {"sources", {"preimage"}}, {"deltas", json::array()},
              {"atom_depth", 12}, {"cesaro_depth", 6},       {"eigen_depth", 20}};
    case ExperimentKind::Rate:
      return {{"x0", nullptr}, {"observable", ""}, {"q_min", -6.0}, {"q_max", 6.0}, {"q_step", 0.05},
              {"s_min", 0.0},  {"s_max", 1.0},     {"s_count", 101}, {"method", "tree"},
              {"atom_depth", 12}, {"eigen_depth", 20}};
    case ExperimentKind::EntropyLocal:
      return {{"x0", nullptr},         {"source", "periodic"}, {"constraints", json::array()},
              {"delta_scales", {1.0}}, {"atom_depth", 12},     {"eigen_depth", 20}};
    case ExperimentKind::Esc:
      return {{"x", nullptr}, {"r0", 0.05}, {"probes", 16}};
    case ExperimentKind::SftOracle:
      return {{"count", 100}, {"max_alphabet", 5}, {"spread", 1.0}, {"shifts", json::array()}, {"tail", nullptr}};
    case ExperimentKind::BridgeValidate:
      return {{"a", 0.0}, {"b", 0.0}, {"s", {0.55, 0.6, 0.7, 0.8}}, {"width", 1e-8}};
  }
  return json::object();
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"atom_budget", 16777216.0}, {"root_tolerance", 1e-12}, {"merge_radius", 1e-8},
      {"julia_resolution", 1e-4},  {"julia_delta", 1e-4},     {"dedup_radius", 1e-8},
      {"min_multiplier", 1.0 - 1e-6}, {"convexity", 1e-3},    {"boundary", 1e-9},
  };
  return t;
}

bool same_shape(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

void check_list_of_names(const json& v, const std::set<std::string>& allowed, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a nonempty array");
  for (const json& s : v) {
    if (!s.is_string() || !allowed.count(s.get<std::string>())) fail(where, "unexpected entry " + s.dump());
  }
}

void check_q_grid(const json& v, const std::string& where) {
  check_keys(v, {"q_min", "q_max", "q_step"}, where);
  const double lo = number(require(v, "q_min", where), where + ".q_min");
  const double hi = number(require(v, "q_max", where), where + ".q_max");
  const double step = number(require(v, "q_step", where), where + ".q_step");
  if (!(lo <= 0.0 && hi >= 0.0 && step > 0.0)) fail(where, "need q_min <= 0 <= q_max and q_step > 0");
  const double k0 = -lo / step;
  if (std::abs(k0 - std::round(k0)) > 1e-9) fail(where, "q = 0 must be a grid point");
}

void check_params(ExperimentConfig& c, const std::string& where) {
  const std::set<std::string> sources = {"periodic", "preimage", "birkhoff"};
  auto has_observable = [&](const std::string& name, const std::string& at) {
    for (const Observable& o : c.observables) {
      if (o.name() == name) return;
    }
    fail(at, "unknown observable '" + name + "'");
  };
  const json& p = c.params;
  auto point_or_null = [&](const char* key) {
    if (p.contains(key) && !p.at(key).is_null()) parse_point(p.at(key), where + "." + key);
  };
  switch (c.kind) {
    case ExperimentKind::Pressure:
      check_list_of_names(p["methods"], {"tree", "periodic", "birkhoff", "separated"}, where + ".methods");
      point_or_null("x0");
      if (!(p["eps"].get<double>() > 0.0)) fail(where + ".eps", "must be positive");
      if (!p["curve"].is_null()) {
        const json& cv = p["curve"];
        check_keys(cv, {"observable", "q_min", "q_max", "q_step"}, where + ".curve");
        has_observable(text(require(cv, "observable", where + ".curve"), where + ".curve.observable"),
                       where + ".curve.observable");
        json grid = cv;
        grid.erase("observable");
        check_q_grid(grid, where + ".curve");
      }
      break;
    case ExperimentKind::Equilibrium:
      point_or_null("x0");
      if (!p["arc"].is_null()) {
        const std::vector<double> arc = number_list(p["arc"], where + ".arc");
        if (arc.size() != 2 || !(arc[0] < arc[1])) fail(where + ".arc", "expected [start, end] in turns");
      }
      break;
    case ExperimentKind::Rpf:
      if (p["sample_size"].get<int>() < 1) fail(where + ".sample_size", "must be positive");
      break;
    case ExperimentKind::LdpLevel1: {
      point_or_null("x0");
      check_list_of_names(p["sources"], sources, where + ".sources");
      has_observable(p["observable"].get<std::string>(), where + ".observable");
      if (!p["thresholds"].is_array() || p["thresholds"].empty()) fail(where + ".thresholds", "expected a nonempty array");
      for (const json& t : p["thresholds"]) {
        check_keys(t, {"kind", "value"}, where + ".thresholds");
        const std::string k = text(require(t, "kind", where + ".thresholds"), where + ".thresholds.kind");
        if (k != ">" && k != "<" && k != "|>|" && k != ">=") fail(where + ".thresholds.kind", "one of >, <, |>|, >=");
        number(require(t, "value", where + ".thresholds"), where + ".thresholds.value");
      }
      if (!p["rate"].is_null()) check_q_grid(p["rate"], where + ".rate");
      break;
    }
    case ExperimentKind::LdpLevel2: {
      point_or_null("x0");
      check_list_of_names(p["sources"], sources, where + ".sources");
      const std::vector<double> d = number_list(p["deltas"], where + ".deltas");
      if (d.size() != c.observables.size()) fail(where + ".deltas", "one delta per observable");
      if (c.observables.empty()) fail("observables", "ldp-level2 needs at least one observable");
      break;
    }
    case ExperimentKind::Rate: {
      point_or_null("x0");
      has_observable(p["observable"].get<std::string>(), where + ".observable");
      check_q_grid({{"q_min", p["q_min"]}, {"q_max", p["q_max"]}, {"q_step", p["q_step"]}}, where);
      if (p["s_count"].get<int>() < 2 || !(p["s_min"].get<double>() < p["s_max"].get<double>())) {
        fail(where, "need s_min < s_max and s_count >= 2");
      }
      const std::string m = p["method"].get<std::string>();
      if (m != "tree" && m != "periodic") fail(where + ".method", "tree or periodic");
      break;
    }
    case ExperimentKind::EntropyLocal: {
      point_or_null("x0");
      const std::string s = p["source"].get<std::string>();
      if (s != "periodic" && s != "preimage") fail(where + ".source", "periodic or preimage");
      for (const json& k : p["constraints"]) {
        check_keys(k, {"observable", "center", "delta"}, where + ".constraints");
        has_observable(text(require(k, "observable", where + ".constraints"), where + ".constraints"),
                       where + ".constraints.observable");
        const json& center = require(k, "center", where + ".constraints");
        if (!center.is_number() && center != "equilibrium") fail(where + ".constraints.center", "number or \"equilibrium\"");
        if (!(number(require(k, "delta", where + ".constraints"), where + ".constraints.delta") > 0.0)) {
          fail(where + ".constraints.delta", "must be positive");
        }
      }
      for (double s : number_list(p["delta_scales"], where + ".delta_scales")) {
        if (!(s > 0.0)) fail(where + ".delta_scales", "must be positive");
      }
      break;
    }
    case ExperimentKind::Esc:
      point_or_null("x");
      if (!(p["r0"].get<double>() > 0.0) || p["probes"].get<int>() < 1) fail(where, "need r0 > 0 and probes >= 1");
      for (int n : c.depths) {
        if (n < 2) fail("depths", "esc depths are pullback depths n_max >= 2");
      }
      break;
    case ExperimentKind::SftOracle:
      if (p["count"].get<int>() < 0 || p["max_alphabet"].get<int>() < 2 || p["max_alphabet"].get<int>() > 16) {
        fail(where, "need count >= 0 and 2 <= max_alphabet <= 16");
      }
      for (const json& s : p["shifts"]) {
        check_keys(s, {"allowed", "potential"}, where + ".shifts");
        require(s, "allowed", where + ".shifts");
        require(s, "potential", where + ".shifts");
      }
      if (!p["tail"].is_null()) {
        check_keys(p["tail"], {"a", "b", "n", "s"}, where + ".tail");
        number(require(p["tail"], "a", where + ".tail"), where + ".tail.a");
        number(require(p["tail"], "b", where + ".tail"), where + ".tail.b");
        for (double n : number_list(require(p["tail"], "n", where + ".tail"), where + ".tail.n")) {
          if (n < 1 || n != std::floor(n)) fail(where + ".tail.n", "positive integers");
        }
        number_list(require(p["tail"], "s", where + ".tail"), where + ".tail.s");
      }
      break;
    case ExperimentKind::BridgeValidate:
      number_list(p["s"], where + ".s");
      if (!(p["width"].get<double>() >= 0.0)) fail(where + ".width", "must be nonnegative");
      break;
  }
}

}  // namespace

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Pressure:
      return "pressure";
    case ExperimentKind::Equilibrium:
      return "equilibrium";
    case ExperimentKind::Rpf:
      return "rpf";
    case ExperimentKind::LdpLevel1:
      return "ldp-level1";
    case ExperimentKind::LdpLevel2:
      return "ldp-level2";
    case ExperimentKind::Rate:
      return "rate";
    case ExperimentKind::EntropyLocal:
      return "entropy-local";
    case ExperimentKind::Esc:
      return "esc";
    case ExperimentKind::SftOracle:
      return "sft-oracle";
    case ExperimentKind::BridgeValidate:
      return "bridge-validate";
  }
  return "?";
}

SpherePoint parse_point(const json& v, const std::string& where) {
  if (v.is_string() && v.get<std::string>() == "infinity") return SpherePoint::infinity();
  if (v.is_array() && v.size() == 2) return SpherePoint(number(v[0], where), number(v[1], where));
  fail(where, "point must be [re, im] or \"infinity\"");
}

RationalMap parse_map(const json& v, const std::string& where) {
  check_keys(v, {"type", "coefficients", "numerator", "denominator"}, where);
  const std::string type = text(require(v, "type", where), where + ".type");
  try {
    if (type == "polynomial") {
      if (v.contains("numerator") || v.contains("denominator")) fail(where, "polynomial takes 'coefficients' only");
      return RationalMap::polynomial(coefficients(require(v, "coefficients", where), where + ".coefficients"));
    }
    if (type == "rational") {
      if (v.contains("coefficients")) fail(where, "rational takes 'numerator' and 'denominator'");
      return RationalMap::rational(coefficients(require(v, "numerator", where), where + ".numerator"),
                                   coefficients(require(v, "denominator", where), where + ".denominator"));
    }
  } catch (const InvalidMap& e) {
    fail(where, e.what());
  }
  fail(where + ".type", "expected polynomial or rational");
}

Observable parse_observable(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object");
  const std::string type = text(require(v, "type", where), where + ".type");
  std::set<std::string> keys = {"type", "name", "holder_exponent"};
  Observable o;
  try {
    if (type == "constant") {
      keys.insert("value");
      check_keys(v, keys, where);
      o = Observable::constant(number(require(v, "value", where), where + ".value"));
    } else if (type == "re_poly" || type == "im_poly") {
      keys.insert("coefficients");
      check_keys(v, keys, where);
      auto c = coefficients(require(v, "coefficients", where), where + ".coefficients");
      o = type == "re_poly" ? Observable::re_poly(c) : Observable::im_poly(c);
    } else if (type == "neg_t_log_deriv") {
      keys.insert("t");
      check_keys(v, keys, where);
      o = Observable::neg_t_log_deriv(number(require(v, "t", where), where + ".t"));
    } else if (type == "arc_indicator") {
      keys.insert({"start", "end", "width"});
      check_keys(v, keys, where);
      o = Observable::arc_indicator(number(require(v, "start", where), where + ".start"),
                                    number(require(v, "end", where), where + ".end"),
                                    number(require(v, "width", where), where + ".width"));
    } else if (type == "symbol_frequency") {
      keys.insert("width");
      check_keys(v, keys, where);
      o = symbol_frequency(v.contains("width") ? number(v["width"], where + ".width") : 1e-8);
    } else if (type == "symbol_potential") {
      keys.insert({"a", "b", "width"});
      check_keys(v, keys, where);
      o = symbol_potential(number(require(v, "a", where), where + ".a"), number(require(v, "b", where), where + ".b"),
                           v.contains("width") ? number(v["width"], where + ".width") : 1e-8);
    } else if (type == "linear_combination") {
      keys.insert("terms");
      check_keys(v, keys, where);
      const json& terms = require(v, "terms", where);
      if (!terms.is_array() || terms.empty()) fail(where + ".terms", "expected a nonempty array");
      std::vector<Observable::Term> parsed;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string at = where + ".terms[" + std::to_string(i) + "]";
        check_keys(terms[i], {"weight", "observable"}, at);
        parsed.push_back({number(require(terms[i], "weight", at), at + ".weight"),
                          parse_observable(require(terms[i], "observable", at), at + ".observable")});
      }
      o = Observable::linear_combination(std::move(parsed));
    } else {
      fail(where + ".type", "unknown observable type '" + type + "'");
    }
    if (v.contains("holder_exponent")) o = o.with_holder_exponent(number(v["holder_exponent"], where + ".holder_exponent"));
  } catch (const InvalidArgument& e) {
    fail(where, e.what());
  }
  if (v.contains("name")) o = o.with_name(text(v["name"], where + ".name"));
  return o;
}

const Observable& ExperimentConfig::observable(const std::string& name) const {
  return observables.at(find_observable(observables, name));
}

SolverOptions ExperimentConfig::solver_options() const {
  SolverOptions s;
  s.root_tolerance = tolerances.at("root_tolerance");
  s.merge_radius = tolerances.at("merge_radius");
  return s;
}

TreeOptions ExperimentConfig::tree_options() const {
  TreeOptions t;
  t.atom_budget = static_cast<std::uint64_t>(tolerances.at("atom_budget"));
  t.solver = solver_options();
  return t;
}

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc, {"kind", "map", "potential", "observables", "depths", "tolerances", "seed", "output", "params"},
             "config");
  ExperimentConfig c;
  c.raw = doc;
  const std::string kind = text(require(doc, "kind", "config"), "kind");
  bool known = false;
  for (int k = 0; k <= static_cast<int>(ExperimentKind::BridgeValidate); ++k) {
    if (kind == kind_name(static_cast<ExperimentKind>(k))) {
      c.kind = static_cast<ExperimentKind>(k);
      known = true;
    }
  }
  if (!known) fail("kind", "unknown experiment kind '" + kind + "'");

  if (c.kind != ExperimentKind::SftOracle) {
    c.map = parse_map(require(doc, "map", "config"), "map");
  } else if (doc.contains("map")) {
    fail("map", "sft-oracle runs take no map");
  }
  if (doc.contains("potential")) {
    c.potential = parse_observable(doc["potential"], "potential");
    if (c.potential.name().empty()) c.potential = c.potential.with_name("phi");
  }
  if (doc.contains("observables")) {
    const json& obs = doc["observables"];
    if (!obs.is_array()) fail("observables", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string at = "observables[" + std::to_string(i) + "]";
      if (!obs[i].is_object() || !obs[i].contains("name")) fail(at, "every observable needs a name");
      c.observables.push_back(parse_observable(obs[i], at));
      if (!names.insert(c.observables.back().name()).second) fail(at, "duplicate name");
    }
  }
  if (doc.contains("depths")) {
    const json& d = doc["depths"];
    if (!d.is_array()) fail("depths", "expected an array of integers");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const int n = integer(d[i], "depths[" + std::to_string(i) + "]");
      if (n < 1 || n > 60) fail("depths[" + std::to_string(i) + "]", "depth must lie in [1, 60]");
      c.depths.push_back(n);
    }
  }
  if (c.depths.empty() && c.kind != ExperimentKind::SftOracle) fail("depths", "at least one depth is required");

  c.tolerances = default_tolerances();
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) fail("tolerances", "expected an object");
    for (const auto& [key, value] : t.items()) {
      if (!c.tolerances.count(key)) fail("tolerances", "unknown key '" + key + "'");
      const double v = number(value, "tolerances." + key);
      if (!(v > 0.0)) fail("tolerances." + key, "must be positive");
      c.tolerances[key] = v;
    }
  }
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) c.output = text(doc["output"], "output");

  c.params = default_params(c.kind);
  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) fail("params", "expected an object");
    for (const auto& [key, value] : p.items()) {
      if (!c.params.contains(key)) fail("params", "unknown key '" + key + "' for " + kind);
      const json& def = c.params[key];
      if (!def.is_null() && !same_shape(def, value)) fail("params." + key, "expected " + std::string(def.type_name()));
      c.params[key] = value;
    }
  }
  check_params(c, "params");

  if (c.kind == ExperimentKind::BridgeValidate) {
    if (doc.contains("potential")) fail("potential", "bridge-validate builds its potential from params a and b");
    const RationalMap& m = *c.map;
    if (!(m.is_polynomial() && m.degree() == 2 && m.numerator().size() == 3 && m.numerator()[0] == Complex{} &&
          m.numerator()[1] == Complex{} && m.numerator()[2] == Complex{1.0, 0.0})) {
      fail("map", "bridge-validate is defined for z^2 only");
    }
    for (int n : c.depths) {
      if (n > 24) fail("depths", "bridge depth must be at most 24");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigInvalid("cannot read " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(path + ": " + e.what());
  }
  return parse_config(doc);
}

std::string config_hash(const json& doc) {
  const std::string canonical = doc.dump();  // object keys are sorted by nlohmann::json
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    static const char* kDigits = "0123456789abcdef";
    hex << kDigits[digest[i] >> 4] << kDigits[digest[i] & 15];
  }
  return hex.str();
}

}  // namespace tce::cli
