#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcethermo/observable.hpp"
#include "tcethermo/rational_map.hpp"
#include "tcethermo/tree.hpp"

namespace tce::cli {

enum class ExperimentKind {
  Pressure,
  Equilibrium,
  Rpf,
  LdpLevel1,
  LdpLevel2,
  Rate,
  EntropyLocal,
  Esc,
  SftOracle,
  BridgeValidate,
};
const char* kind_name(ExperimentKind k);

/// A validated experiment description. `params` and `tolerances` hold every
/// value the run will use, defaults included, so the manifest can record
/// them verbatim.
struct ExperimentConfig {
  nlohmann::json raw;
  ExperimentKind kind = ExperimentKind::Pressure;
  std::optional<RationalMap> map;
  Observable potential = Observable::constant(0.0).with_name("phi");
  std::vector<Observable> observables;
  std::vector<int> depths;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::string output = "out";
  nlohmann::json params = nlohmann::json::object();

  const Observable& observable(const std::string& name) const;
  TreeOptions tree_options() const;
  SolverOptions solver_options() const;
};

/// Throws ConfigInvalid with the offending path for any schema violation,
/// including unknown keys.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Hex SHA-256 of the canonical (sorted-key, compact) serialization.
std::string config_hash(const nlohmann::json& doc);

Observable parse_observable(const nlohmann::json& spec, const std::string& where);
RationalMap parse_map(const nlohmann::json& spec, const std::string& where);
SpherePoint parse_point(const nlohmann::json& spec, const std::string& where);

}  // namespace tce::cli
