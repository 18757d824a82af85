#pragma once

#include <cstdint>
#include <filesystem>

#include "mhof/trace.hpp"

namespace mhof {

/// Per-component panels of reg_i and setpoint b_i over epochs plus one
/// log-scale multiplier panel, with shrink epochs marked. The CSV companion
/// holds exactly the plotted series (k, reg, b, mu, shrank), values verbatim.
void render_dynamics(const Trace& trace, const std::filesystem::path& svg_path,
                     const std::filesystem::path& csv_path);

/// Scatter of (reg[reg_index], ell) in epoch order with a color ramp, the
/// initial point emphasized and the selected model marked. Every stride-th
/// epoch is plotted; epoch 0 and the selected epoch are always included.
void render_phase_portrait(const Trace& trace, std::size_t reg_index,
                           const std::filesystem::path& svg_path,
                           const std::filesystem::path& csv_path,
                           std::uint64_t stride = 1);

}  // namespace mhof
