#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "mhof/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"M-HOF-Opt: multi-objective training controller experiments"};
  app.require_subcommand(1);

  std::string config_path, report_target;
  std::string out_dir;
  std::size_t parallelism = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "execute a single configured run");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("-o,--out", out_dir, "output directory");

  auto* compare = app.add_subcommand("compare", "execute a config grid");
  compare->add_option("config", config_path, "experiment config (JSON)")->required();
  compare->add_option("-o,--out", out_dir, "output directory");
  compare->add_option("-j,--parallelism", parallelism, "max concurrent cells");

  auto* report = app.add_subcommand("report", "audit stored trace files");
  report->add_option("path", report_target, "trace file or directory")->required();
  report->add_option("-o,--out", out_dir, "output directory for figures");

  CLI11_PARSE(app, argc, argv);

  std::optional<std::filesystem::path> out;
  if (!out_dir.empty()) out = out_dir;

  if (run->parsed()) return mhof::cmd_run(config_path, out);
  if (compare->parsed()) return mhof::cmd_compare(config_path, out, parallelism);
  return mhof::cmd_report(report_target, out);
}
