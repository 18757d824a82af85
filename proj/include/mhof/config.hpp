#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mhof/plant.hpp"
#include "mhof/schemes.hpp"

namespace mhof {

/// A parsed experiment file: one problem, one optimizer, per-scheme config
/// grids (already expanded from any per-field value lists), and seeds.
struct ExperimentConfig {
  ProblemSpec problem;
  OptimizerState optimizer;
  std::map<std::string, std::vector<SchemeConfig>> grids;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;  // empty when the file names none

  explicit ExperimentConfig(ProblemSpec prob) : problem(std::move(prob)) {}

  std::size_t total_runs() const;
};

/// Parses a JSON experiment description. Scalar-or-list fields (mu0, rho,
/// eta, v_sat, mu_clip, xi_d, xi_o, xi_r, warmup_epochs, budget) expand as a
/// Cartesian product in that order; mu0 additionally accepts a vector list
/// or {"product": [per-component values]}. Unknown keys are errors naming
/// the key. Throws ConfigError / ParseError.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace mhof
