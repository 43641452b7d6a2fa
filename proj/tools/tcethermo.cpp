#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tcethermo/cli/config.hpp"
#include "tcethermo/cli/run.hpp"
#include "tcethermo/errors.hpp"

namespace {

// Exit codes: 0 success, 1 a stage failed, 2 invalid configuration.
constexpr int kStageFailed = 1;
constexpr int kConfigInvalid = 2;

struct Common {
  unsigned threads = 0;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_run_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--threads", c.threads, "Worker threads (default: hardware concurrency)")
      ->check(CLI::Range(1u, 1024u));
  cmd->add_option("--out", c.out, "Output directory (overrides the config)");
  cmd->add_option_function<std::uint64_t>(
      "--seed-override",
      [&c](const std::uint64_t& s) {
        c.seed = s;
        c.seed_set = true;
      },
      "Seed replacing the one in the config");
}

tce::cli::RunOptions options_from(const Common& c) {
  tce::cli::RunOptions o;
  o.threads = c.threads;
  if (!c.out.empty()) o.out = c.out;
  if (c.seed_set) o.seed = c.seed;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism experiments for rational maps"};
  app.set_version_flag("--version", std::string(tce::cli::kToolVersion));
  app.require_subcommand(1);

  Common common;
  std::string config_path;

  CLI::App* run = app.add_subcommand("run", "Run an experiment and write CSVs, summary.txt and manifest.json");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  add_run_flags(run, common);

  CLI::App* validate = app.add_subcommand("validate", "Check a config against the schema and the atom budget");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI::App* oracle = app.add_subcommand("oracle", "Run the subshift oracle battery");
  std::optional<std::string> oracle_config;
  oracle->add_option("config", oracle_config, "Optional sft-oracle config (defaults to 100 random shifts)");
  add_run_flags(oracle, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const tce::cli::ExperimentConfig cfg = tce::cli::load_config(config_path);
      const tce::cli::ValidationReport report = tce::cli::validate_config(cfg);
      if (!report.ok()) {
        std::cerr << report.text();
        return kConfigInvalid;
      }
      if (!report.warnings.empty()) std::cerr << report.text();
      return tce::cli::run_experiment(cfg, options_from(common), std::cout) == 0 ? 0 : kStageFailed;
    }
    if (*validate) {
      const tce::cli::ValidationReport report = tce::cli::validate_config(tce::cli::load_config(config_path));
      std::cout << report.text();
      return report.ok() ? 0 : kConfigInvalid;
    }
    if (*oracle) {
      const tce::cli::ExperimentConfig cfg =
          oracle_config ? tce::cli::load_config(*oracle_config) : tce::cli::default_oracle_config();
      if (cfg.kind != tce::cli::ExperimentKind::SftOracle) {
        std::cerr << "oracle expects a config of kind sft-oracle\n";
        return kConfigInvalid;
      }
      return tce::cli::run_experiment(cfg, options_from(common), std::cout) == 0 ? 0 : kStageFailed;
    }
  } catch (const tce::ConfigInvalid& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const tce::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageFailed;
  }
  return 0;
}
