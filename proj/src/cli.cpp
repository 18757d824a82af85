#include "mhof/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mhof/config.hpp"
#include "mhof/controller.hpp"
#include "mhof/format.hpp"
#include "mhof/render.hpp"
#include "mhof/schemes.hpp"
#include "mhof/trace.hpp"

namespace mhof {

namespace {

namespace fs = std::filesystem;

int fail(const std::string& message, int code) {
  std::cerr << "error: " << message << '\n';
  return code;
}

fs::path resolve_out_dir(const ExperimentConfig& cfg,
                         const std::optional<fs::path>& out_override) {
  fs::path dir = out_override ? *out_override
                              : (cfg.output_dir.empty() ? fs::path(".")
                                                        : fs::path(cfg.output_dir));
  fs::create_directories(dir);
  return dir;
}

void apply_seed_env(ExperimentConfig& cfg) {
  const char* env = std::getenv("MHOF_SEED");
  if (!env || *env == '\0') return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0') {
    throw ConfigError("MHOF_SEED: '" + std::string(env) +
                      "' is not a non-negative integer");
  }
  cfg.seeds = {static_cast<std::uint64_t>(value)};
}

std::uint64_t shrink_count(const Trace& trace) {
  std::uint64_t n = 0;
  for (const auto& rec : trace.epochs()) n += rec.shrank ? 1 : 0;
  return n;
}

void emit_figures(const Trace& trace, const fs::path& dir,
                  const std::string& stem) {
  if (trace.empty()) return;
  render_dynamics(trace, dir / (stem + "_dynamics.svg"),
                  dir / (stem + "_dynamics.csv"));
  render_phase_portrait(trace, 0, dir / (stem + "_phase.svg"),
                        dir / (stem + "_phase.csv"));
}

struct Audit {
  std::string name;
  bool pass;
};

std::vector<Audit> audit_trace(const Trace& trace) {
  const auto& ep = trace.epochs();
  std::vector<Audit> audits;

  bool setpoint_ok = true;
  for (std::size_t k = 1; k < ep.size(); ++k) {
    for (std::size_t i = 0; i < trace.meta().d; ++i) {
      if (ep[k].b[i] > ep[k - 1].b[i]) setpoint_ok = false;
    }
  }
  audits.push_back({"setpoint-non-increasing", setpoint_ok});

  bool shrink_ok = true;
  std::vector<std::size_t> anchors{0};  // epoch 0 plus every earlier shrink
  for (std::size_t k = 1; k < ep.size(); ++k) {
    if (!ep[k].shrank) continue;
    const auto current = ObjectiveVector(ep[k].ell, ep[k].reg).joint();
    for (std::size_t a : anchors) {
      const auto prior = ObjectiveVector(ep[a].ell, ep[a].reg).joint();
      if (!dominates(current, prior) || !(ep[k].ell < ep[a].ell)) {
        shrink_ok = false;
      }
    }
    anchors.push_back(k);
  }
  audits.push_back({"shrink-implies-pareto-descent", shrink_ok});

  bool ehv_monotone = true;
  for (std::size_t k = 1; k < ep.size(); ++k) {
    if (ep[k].ehv < ep[k - 1].ehv) ehv_monotone = false;
  }
  audits.push_back({"ehv-non-decreasing", ehv_monotone});

  bool ehv_match = true;
  if (!ep.empty()) {
    const RefPoint ref = trace.ref_point();
    Archive arch;
    for (const auto& rec : ep) {
      arch.append(ObjectiveVector(rec.ell, rec.reg));
      if (ehv_of_archive(arch, ref) != rec.ehv) ehv_match = false;
    }
  }
  audits.push_back({"ehv-recompute-match", ehv_match});

  bool mu_positive = true;
  for (const auto& rec : ep) {
    for (double m : rec.mu) {
      if (!(m > 0.0)) mu_positive = false;
    }
  }
  audits.push_back({"mu-positive", mu_positive});

  bool ellbound_ok = true;
  if (ep.size() >= 2) {
    const EllBoundReport report = ellbound_diagnostic(trace);
    for (const auto& comp : report.components) {
      if (!comp.segment_bound_holds) ellbound_ok = false;
    }
  }
  audits.push_back({"ellbound-segment", ellbound_ok});

  return audits;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

int cmd_run(const fs::path& config_path,
            const std::optional<fs::path>& out_override) {
  fs::path out;
  RunResult result{Trace(TraceMeta{"", "", 0, 1, 1})};
  bool degenerate = false;
  try {
    ExperimentConfig cfg = load_config(config_path);
    apply_seed_env(cfg);
    if (cfg.total_runs() != 1) {
      return fail("config expands to " + std::to_string(cfg.total_runs()) +
                      " runs; 'run' requires exactly 1 (use 'compare')",
                  2);
    }
    out = resolve_out_dir(cfg, out_override);
    const auto& configs = cfg.grids.begin()->second;
    result = run(cfg.problem, cfg.optimizer, configs.front(), cfg.seeds.front());
    degenerate = result.degenerate_gain;
  } catch (const Error& err) {
    return fail(err.what(), 2);
  }

  try {
    save_trace(result.trace, out / "trace.jsonl");
    emit_figures(result.trace, out, "run");
  } catch (const Error& err) {
    return fail(err.what(), 2);
  }
  if (degenerate) {
    std::cerr << "warning: controller gain degenerate (a component started at "
                 "its setpoint)\n";
  }
  if (result.failed_epoch) {
    return fail("numeric abort at epoch " +
                    std::to_string(*result.failed_epoch) + ": " + result.error +
                    " (partial trace saved)",
                3);
  }
  std::cout << "selected_epoch=" << result.selected_epoch
            << " final_ehv=" << format_double(result.final_ehv)
            << " shrink_count=" << shrink_count(result.trace) << '\n';
  return 0;
}

int cmd_compare(const fs::path& config_path,
                const std::optional<fs::path>& out_override,
                std::size_t parallelism) {
  if (parallelism == 0) return fail("parallelism must be >= 1", 2);
  GridResult grid;
  fs::path out;
  std::size_t d = 0;
  try {
    ExperimentConfig cfg = load_config(config_path);
    apply_seed_env(cfg);
    out = resolve_out_dir(cfg, out_override);
    d = cfg.problem.reg_count();
    grid = grid_compare(cfg.problem, cfg.optimizer, cfg.grids, cfg.seeds,
                        parallelism);
  } catch (const Error& err) {
    return fail(err.what(), 2);
  }

  try {
    for (const auto& cell : grid.cells) {
      if (!cell.trace) continue;
      const std::string name = "trace_" + cell.scheme + "_" +
                               std::to_string(cell.config_index) + "_" +
                               std::to_string(cell.seed) + ".jsonl";
      save_trace(*cell.trace, out / name);
    }

    std::ofstream table(out / "comparison.csv");
    if (!table) return fail("cannot write comparison.csv", 2);
    table << "scheme,config,seed,status,final_ell";
    for (std::size_t i = 0; i < d; ++i) table << ",final_reg" << i;
    table << ",final_ehv,selected_epoch,selected_ell";
    for (std::size_t i = 0; i < d; ++i) table << ",selected_reg" << i;
    table << ",error\n";
    for (const auto& cell : grid.cells) {
      table << cell.scheme << ',' << cell.config_index << ',' << cell.seed
            << ',' << (cell.failed ? "failed" : "ok");
      const bool has_values = cell.trace && !cell.trace->empty();
      auto value = [&](double v) { return has_values ? format_double(v) : ""; };
      table << ',' << value(cell.final_ell);
      for (std::size_t i = 0; i < d; ++i) {
        table << ',' << (has_values ? format_double(cell.final_reg[i]) : "");
      }
      table << ',' << value(cell.final_ehv);
      table << ',' << (has_values ? std::to_string(cell.selected_epoch) : "");
      table << ',' << value(cell.selected_ell);
      for (std::size_t i = 0; i < d; ++i) {
        table << ',' << (has_values ? format_double(cell.selected_reg[i]) : "");
      }
      table << ',' << (cell.error.empty() ? "" : csv_quote(cell.error)) << '\n';
    }

    std::ofstream summary(out / "summary.csv");
    if (!summary) return fail("cannot write summary.csv", 2);
    summary << "scheme,cells,failures,iqr_selected_ell,iqr_final_ell\n";
    for (const auto& s : grid.summaries) {
      summary << s.scheme << ',' << s.cells << ',' << s.failures << ','
              << format_double(s.iqr_selected_ell) << ','
              << format_double(s.iqr_final_ell) << '\n';
      std::cout << "scheme=" << s.scheme << " cells=" << s.cells
                << " failures=" << s.failures
                << " iqr_selected_ell=" << format_double(s.iqr_selected_ell)
                << " iqr_final_ell=" << format_double(s.iqr_final_ell) << '\n';
    }
  } catch (const Error& err) {
    return fail(err.what(), 2);
  }

  const bool any_ok = std::any_of(grid.cells.begin(), grid.cells.end(),
                                  [](const GridCell& c) { return !c.failed; });
  if (!any_ok) return fail("every grid cell failed", 3);
  return 0;
}

int cmd_report(const fs::path& target,
               const std::optional<fs::path>& out_override) {
  std::vector<fs::path> files;
  if (fs::is_directory(target)) {
    for (const auto& entry : fs::directory_iterator(target)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(target)) {
    files.push_back(target);
  }
  if (files.empty()) {
    return fail("no trace files at '" + target.string() + "'", 2);
  }
  fs::path out;
  if (out_override) {
    out = *out_override;
  } else if (fs::is_directory(target)) {
    out = target;
  } else {
    out = target.parent_path();
    if (out.empty()) out = ".";
  }
  fs::create_directories(out);

  bool all_pass = true;
  for (const auto& file : files) {
    Trace trace{TraceMeta{"", "", 0, 1, 1}};
    try {
      trace = load_trace(file);
    } catch (const Error& err) {
      return fail(file.string() + ": " + err.what(), 2);
    }
    try {
      emit_figures(trace, out, file.stem().string());
    } catch (const Error& err) {
      return fail(file.string() + ": " + err.what(), 2);
    }
    for (const Audit& audit : audit_trace(trace)) {
      std::cout << file.filename().string() << ": " << audit.name << ": "
                << (audit.pass ? "PASS" : "FAIL") << '\n';
      all_pass = all_pass && audit.pass;
    }
  }
  return all_pass ? 0 : 1;
}

}  // namespace mhof
