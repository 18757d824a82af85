#include "mhof/schemes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <utility>

#include <json.hpp>

#include "mhof/digest.hpp"

namespace mhof {

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::mhof: return "mhof";
    case SchemeKind::fixed: return "fixed";
    case SchemeKind::warmup_linear: return "warmup-linear";
    case SchemeKind::warmup_sigmoid: return "warmup-sigmoid";
  }
  throw ConfigError("scheme: unknown enum value");
}

SchemeKind scheme_from_string(const std::string& name) {
  if (name == "mhof") return SchemeKind::mhof;
  if (name == "fixed") return SchemeKind::fixed;
  if (name == "warmup-linear") return SchemeKind::warmup_linear;
  if (name == "warmup-sigmoid") return SchemeKind::warmup_sigmoid;
  throw ConfigError("scheme: unknown scheme '" + name + "'");
}

void SchemeConfig::validate() const {
  if (budget == 0) throw ConfigError("budget: must be >= 1");
  if (inner_steps == 0) throw ConfigError("inner_steps: must be >= 1");
  if (mu0.empty()) throw ConfigError("mu0: must have at least one component");
  for (double m : mu0) {
    if (!(m > 0.0)) throw ConfigError("mu0: every component must be positive");
  }
  if (scheme == SchemeKind::mhof) {
    controller.validate(mu0);
  } else if (scheme != SchemeKind::fixed && warmup_epochs == 0) {
    throw ConfigError("warmup_epochs: must be >= 1");
  }
}

std::string digest(const SchemeConfig& cfg) {
  nlohmann::ordered_json j;
  j["scheme"] = to_string(cfg.scheme);
  j["mu0"] = cfg.mu0;
  j["budget"] = cfg.budget;
  j["inner_steps"] = cfg.inner_steps;
  if (cfg.scheme == SchemeKind::mhof) {
    j["rho"] = cfg.controller.rho;
    j["eta"] = cfg.controller.eta;
    j["v_sat"] = cfg.controller.v_sat;
    j["mu_clip"] = cfg.controller.mu_clip;
    j["xi_d"] = cfg.controller.xi_d;
    j["smoothing"] = cfg.controller.smoothing_enabled;
    j["xi_o"] = cfg.controller.xi_o;
    j["xi_r"] = cfg.controller.xi_r;
  } else if (cfg.scheme != SchemeKind::fixed) {
    j["warmup_epochs"] = cfg.warmup_epochs;
  }
  return fnv1a_hex(j.dump());
}

std::vector<double> baseline_mu(const SchemeConfig& cfg, std::uint64_t k) {
  std::vector<double> mu(cfg.mu0.size());
  const double progress =
      static_cast<double>(k) / static_cast<double>(cfg.warmup_epochs);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    switch (cfg.scheme) {
      case SchemeKind::fixed:
        mu[i] = cfg.mu0[i];
        break;
      case SchemeKind::warmup_linear:
        mu[i] = cfg.mu0[i] * std::max(std::min(1.0, progress), 1e-6);
        break;
      case SchemeKind::warmup_sigmoid:
        mu[i] = cfg.mu0[i] / (1.0 + std::exp(-8.0 * (progress - 0.5)));
        break;
      case SchemeKind::mhof:
        throw ConfigError("baseline_mu: mhof is not an open-loop scheme");
    }
  }
  return mu;
}

RunResult run(const ProblemSpec& prob, const OptimizerState& opt,
              const SchemeConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.mu0.size() != prob.reg_count()) {
    throw DimensionError("mu0 length " + std::to_string(cfg.mu0.size()) +
                         " does not match problem reg count " +
                         std::to_string(prob.reg_count()));
  }

  OptimizerState optimizer = opt;
  optimizer.m.clear();
  optimizer.v.clear();
  optimizer.t = 0;

  TraceMeta meta;
  meta.problem_digest = digest(prob);
  meta.scheme_digest = digest(cfg);
  meta.seed = seed;
  meta.d = prob.reg_count();
  meta.budget = cfg.budget;

  RunResult result{Trace(meta)};
  ModelParams params = init_params(prob, seed);

  const bool closed_loop = cfg.scheme == SchemeKind::mhof;
  const std::vector<double> zeros(prob.reg_count(), 0.0);
  ControllerState ctrl;
  try {
    result.failed_epoch = 0;
    ObjectiveVector obs = evaluate(prob, params);
    std::vector<double> mu = closed_loop ? cfg.mu0 : baseline_mu(cfg, 0);
    if (closed_loop) {
      ctrl = controller_init(obs.reg, obs.ell, cfg.mu0, cfg.controller);
      result.degenerate_gain = ctrl.degenerate_gain;
    }
    result.trace.append(0, obs.ell, obs.reg, mu, closed_loop ? ctrl.b : zeros,
                        false);

    for (std::uint64_t k = 1; k <= cfg.budget; ++k) {
      result.failed_epoch = k;
      bool shrank = false;
      if (closed_loop) {
        ctrl = mu_step(ctrl, obs.reg, cfg.controller);
        mu = ctrl.mu;
      } else {
        mu = baseline_mu(cfg, k);
      }
      auto [next_opt, next_params] = epoch(prob, optimizer, params, mu,
                                           cfg.inner_steps);
      optimizer = std::move(next_opt);
      params = std::move(next_params);
      obs = evaluate(prob, params);
      if (closed_loop) {
        SetpointResult sp = setpoint_step(ctrl, obs.reg, obs.ell, k,
                                          cfg.controller);
        ctrl = std::move(sp.state);
        shrank = sp.shrank;
      }
      result.trace.append(k, obs.ell, obs.reg, mu, closed_loop ? ctrl.b : zeros,
                          shrank);
    }
    result.failed_epoch.reset();
  } catch (const NumericError& err) {
    result.error = err.what();
  }

  if (!result.trace.empty()) {
    result.final_ehv = result.trace.epochs().back().ehv;
    result.selected_epoch = select_model(result.trace);
  }
  return result;
}

std::uint64_t select_model(const Trace& trace) {
  return last_shrink_epoch(trace);
}

double interquartile_range(std::vector<double> values) {
  if (values.size() < 2) return 0.0;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  return quantile(0.75) - quantile(0.25);
}

GridResult grid_compare(const ProblemSpec& prob, const OptimizerState& opt,
                        const std::map<std::string, std::vector<SchemeConfig>>& grids,
                        const std::vector<std::uint64_t>& seeds,
                        std::size_t parallelism) {
  if (grids.empty()) throw ConfigError("grid_compare: no scheme grids given");
  if (seeds.empty()) throw ConfigError("grid_compare: no seeds given");
  for (const auto& [name, configs] : grids) {
    if (configs.empty()) {
      throw ConfigError("grid_compare: scheme '" + name + "' has no configs");
    }
    for (const auto& cfg : configs) cfg.validate();
  }

  std::vector<std::uint64_t> ordered_seeds = seeds;
  std::sort(ordered_seeds.begin(), ordered_seeds.end());

  struct Task {
    const std::string* scheme;
    const SchemeConfig* cfg;
    std::size_t config_index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& [name, configs] : grids) {
    for (std::size_t c = 0; c < configs.size(); ++c) {
      for (std::uint64_t seed : ordered_seeds) {
        tasks.push_back({&name, &configs[c], c, seed});
      }
    }
  }

  GridResult result;
  result.cells.resize(tasks.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      GridCell& cell = result.cells[i];
      cell.scheme = *task.scheme;
      cell.config_index = task.config_index;
      cell.seed = task.seed;
      try {
        RunResult rr = run(prob, opt, *task.cfg, task.seed);
        cell.failed = rr.failed_epoch.has_value();
        cell.error = rr.error;
        cell.trace = std::move(rr.trace);
        if (!cell.trace->empty()) {
          const EpochRecord& last = cell.trace->epochs().back();
          cell.final_ell = last.ell;
          cell.final_reg = last.reg;
          cell.final_ehv = last.ehv;
          cell.selected_epoch = rr.selected_epoch;
          const EpochRecord& sel = cell.trace->epochs()[rr.selected_epoch];
          cell.selected_ell = sel.ell;
          cell.selected_reg = sel.reg;
        }
      } catch (const std::exception& err) {
        cell.failed = true;
        cell.error = err.what();
      }
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min(parallelism, tasks.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& [name, configs] : grids) {
    SchemeSummary summary;
    summary.scheme = name;
    std::vector<double> selected, final_ells;
    for (const auto& cell : result.cells) {
      if (cell.scheme != name) continue;
      ++summary.cells;
      if (cell.failed) {
        ++summary.failures;
        continue;
      }
      selected.push_back(cell.selected_ell);
      final_ells.push_back(cell.final_ell);
    }
    summary.iqr_selected_ell = interquartile_range(std::move(selected));
    summary.iqr_final_ell = interquartile_range(std::move(final_ells));
    result.summaries.push_back(std::move(summary));
  }
  return result;
}

}  // namespace mhof
