#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mhof/controller.hpp"
#include "mhof/plant.hpp"
#include "mhof/trace.hpp"

namespace mhof {

enum class SchemeKind { mhof, fixed, warmup_linear, warmup_sigmoid };

std::string to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& name);

struct SchemeConfig {
  SchemeKind scheme = SchemeKind::mhof;
  std::vector<double> mu0{1.0};  // initial mu (mhof/fixed) or ultimate mu (warmups)
  std::uint64_t warmup_epochs = 50;
  ControllerConfig controller;
  std::uint64_t budget = 100;
  std::uint64_t inner_steps = 5;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

std::string digest(const SchemeConfig& cfg);

/// Open-loop multiplier value of a baseline scheme at epoch k.
std::vector<double> baseline_mu(const SchemeConfig& cfg, std::uint64_t k);

struct RunResult {
  Trace trace;
  std::uint64_t selected_epoch = 0;
  double final_ehv = 0.0;
  std::optional<std::uint64_t> failed_epoch;  // first epoch that aborted
  std::string error;                          // abort message, empty on success
  bool degenerate_gain = false;
};

/// Executes one training run under the configured scheme. The mhof branch
/// follows the controller loop per epoch k: multiplier update from the last
/// observed output, inner_steps plant updates under the new mu, observation,
/// setpoint adaptation, trace append. Numeric aborts keep the partial trace.
/// Adam accumulators in opt are reset before use.
RunResult run(const ProblemSpec& prob, const OptimizerState& opt,
              const SchemeConfig& cfg, std::uint64_t seed);

/// Last shrink epoch of the trace; 0 when no shrink occurred.
std::uint64_t select_model(const Trace& trace);

struct GridCell {
  std::string scheme;
  std::size_t config_index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double final_ell = 0.0;
  std::vector<double> final_reg;
  double final_ehv = 0.0;
  std::uint64_t selected_epoch = 0;
  double selected_ell = 0.0;
  std::vector<double> selected_reg;
  std::optional<Trace> trace;
};

struct SchemeSummary {
  std::string scheme;
  std::size_t cells = 0;
  std::size_t failures = 0;
  double iqr_selected_ell = 0.0;  // over non-failed cells
  double iqr_final_ell = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;          // ordered by (scheme, config, seed)
  std::vector<SchemeSummary> summaries;  // ordered by scheme name
};

/// Runs every (scheme config x seed) cell, at most `parallelism` at a time.
/// Seeds are processed in ascending order; cell results and summaries are
/// identical for every parallelism level. A failing cell is recorded and the
/// rest of the grid continues.
GridResult grid_compare(const ProblemSpec& prob, const OptimizerState& opt,
                        const std::map<std::string, std::vector<SchemeConfig>>& grids,
                        const std::vector<std::uint64_t>& seeds,
                        std::size_t parallelism = 1);

/// Linear-interpolation quartile spread (Q3 - Q1) of the given sample.
double interquartile_range(std::vector<double> values);

}  // namespace mhof
