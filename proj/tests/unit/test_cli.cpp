#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tcethermo/cli/config.hpp"
#include "tcethermo/cli/run.hpp"
#include "tcethermo/csv.hpp"
#include "tcethermo/errors.hpp"

using namespace tce;
using namespace tce::cli;
using nlohmann::json;

namespace {
json minimal() {
  return json{{"kind", "pressure"},
              {"map", {{"type", "polynomial"}, {"coefficients", {0, 0, 1}}}},
              {"depths", {4}}};
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
}  // namespace

TEST_CASE("csv formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  CsvTable t({"n", "name", "value"});
  t.add_row({std::int64_t{3}, std::string("a"), 0.5});
  CHECK(t.str() == "n,name,value\n3,a,0.5\n");
  CHECK_THROWS_AS(t.add_row({std::int64_t{1}}), InvalidArgument);
}

TEST_CASE("config parsing fills defaults") {
  const ExperimentConfig c = parse_config(minimal());
  CHECK(c.kind == ExperimentKind::Pressure);
  CHECK(c.map->degree() == 2);
  CHECK(c.potential.name() == "phi");
  CHECK(c.params["eps"] == 1.9);
  CHECK(c.params["methods"].size() == 4);
  CHECK(c.tolerances.at("atom_budget") == 16777216.0);
  CHECK(c.tree_options().atom_budget == 16777216u);
}

TEST_CASE("config parsing rejects malformed input") {
  json j = minimal();
  j["depth"] = 3;
  CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

  j = minimal();
  j["map"]["type"] = "entire";
  CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

  j = minimal();
  j["depths"] = {0};
  CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

  j = minimal();
  j["observables"] = {{{"type", "re_poly"}, {"coefficients", {0, 1}}, {"name", "x"}},
                      {{"type", "im_poly"}, {"coefficients", {0, 1}}, {"name", "x"}}};
  CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

  j = minimal();
  j["observables"] = {{{"type", "re_poly"}, {"coefficients", {0, 1}}, {"name", "x"}, {"colour", 1}}};
  CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

  j = minimal();
  j["params"] = {{"curve", {{"observable", "missing"}, {"q_min", -1}, {"q_max", 1}, {"q_step", 0.5}}}};
  CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

  j = minimal();
  j["observables"] = {{{"type", "re_poly"}, {"coefficients", {0, 1}}, {"name", "x"}}};
  j["params"] = {{"curve", {{"observable", "x"}, {"q_min", 0.25}, {"q_max", 1}, {"q_step", 0.5}}}};
  CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

  CHECK_THROWS_AS(parse_config(json{{"kind", "sft-oracle"}, {"map", minimal()["map"]}}), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(json{{"kind", "nonsense"}}), ConfigInvalid);
}

TEST_CASE("config hash") {
  CHECK(config_hash(json::object()) == "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
  // key order in the source text does not matter
  CHECK(config_hash(json::parse(R"({"a":1,"b":2})")) == config_hash(json::parse(R"({"b":2,"a":1})")));
  CHECK(config_hash(json{{"a", 1}}) != config_hash(json{{"a", 2}}));
}

TEST_CASE("validation enforces the atom budget") {
  json j = minimal();
  j["depths"] = {30};
  const ValidationReport r = validate_config(parse_config(j));
  CHECK_FALSE(r.ok());
  CHECK(r.estimated_atoms == (std::uint64_t{1} << 33));
  CHECK(validate_config(parse_config(minimal())).ok());
}

TEST_CASE("run writes csv, summary and manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "tcethermo_unit_run";
  std::filesystem::remove_all(dir);
  const ExperimentConfig c = parse_config(json{{"kind", "bridge-validate"},
                                               {"map", {{"type", "polynomial"}, {"coefficients", {0, 0, 1}}}},
                                               {"depths", {8}},
                                               {"params", {{"s", {0.75}}}}});
  RunOptions o;
  o.out = dir.string();
  o.seed = 5;
  std::ostringstream log;
  CHECK(run_experiment(c, o, log) == 0);
  CHECK(log.str().find("bijective") != std::string::npos);
  // 2^-8 * (1 + 8 + 28) words have at least 6 ones out of 8
  const std::string tails = read(dir / "bridge_tails.csv");
  CHECK(tails.find("8,0.75,") != std::string::npos);
  const json m = json::parse(read(dir / "manifest.json"));
  CHECK(m["seed"] == 5);
  CHECK(m["config_hash"] == config_hash(c.raw));
  CHECK(m["errors"] == 0);
  CHECK(m["tolerances"]["boundary"] == 1e-9);
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("default oracle config") {
  const ExperimentConfig c = default_oracle_config();
  CHECK(c.kind == ExperimentKind::SftOracle);
  CHECK(c.params["count"] == 100);
  CHECK(validate_config(c).ok());
}
