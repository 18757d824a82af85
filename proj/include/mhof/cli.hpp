#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

namespace mhof {

/// Exit codes shared by all subcommands: 0 success, 1 audit failure
/// (report only), 2 configuration or parse failure, 3 numeric abort.
/// The environment variable MHOF_SEED, when set, replaces the config's
/// seed list with that single seed for run and compare.

int cmd_run(const std::filesystem::path& config_path,
            const std::optional<std::filesystem::path>& out_override);

int cmd_compare(const std::filesystem::path& config_path,
                const std::optional<std::filesystem::path>& out_override,
                std::size_t parallelism);

int cmd_report(const std::filesystem::path& target,
               const std::optional<std::filesystem::path>& out_override);

}  // namespace mhof
