#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tcethermo/cli/config.hpp"

namespace tce::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  unsigned threads = 0;                     ///< 0 keeps the hardware default
  std::optional<std::string> out;           ///< overrides config.output
  std::optional<std::uint64_t> seed;        ///< overrides config.seed
};

/// Runs every stage of the experiment, writes the CSVs, summary.txt and
/// manifest.json into the output directory and prints the summary to `log`.
/// Returns 0 when no stage failed and 1 otherwise.
int run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

struct ValidationReport {
  std::uint64_t estimated_atoms = 0;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
  std::string text() const;
};

/// Budget and guard checks without running the experiment.
ValidationReport validate_config(const ExperimentConfig& config);

/// The sft-oracle defaults (100 random shifts of alphabet <= 5).
ExperimentConfig default_oracle_config();

}  // namespace tce::cli
