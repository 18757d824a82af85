#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mhof/errors.hpp"
#include "mhof/pareto.hpp"
#include "mhof/trace.hpp"

namespace mhof {

struct ControllerConfig {
  double rho = 0.9;    // initial setpoint fraction, in (0,1)
  double eta = 0.5;    // gain-budget fraction, in (0,1)
  double v_sat = 1.0;  // cap on |change of log mu| per step
  double mu_clip = 1e4;
  double xi_d = 0.5;  // moving average on the tracking error
  bool smoothing_enabled = false;
  double xi_o = 0.1;  // moving average on the observed output
  double xi_r = 0.9;  // moving average on the setpoint target

  /// Throws ConfigError naming the offending field; also requires every
  /// mu0 component in (0, mu_clip].
  void validate(std::span<const double> mu0) const;
};

struct ControllerState {
  std::vector<double> mu;
  std::vector<double> b;
  std::vector<double> gain;     // K_I, fixed after init
  std::vector<double> delta_i;  // integrated (smoothed) tracking error
  double ell_min = 0.0;         // running minimum of ell over all epochs
  std::vector<double> out_smooth;     // smoothed output O_R (smoothing only)
  std::vector<double> target_smooth;  // smoothed setpoint target r (smoothing only)
  std::vector<std::uint64_t> shrink_epochs;
  bool degenerate_gain = false;  // some component started exactly at its setpoint

  std::size_t dim() const { return mu.size(); }
};

/// b = rho*R0; gain chosen so gain_i * (R0_i - b_i) = eta*v_sat; a zero
/// initial error falls back to a 1e-12 denominator and sets degenerate_gain.
ControllerState controller_init(std::span<const double> R0, double ell0,
                                std::span<const double> mu0,
                                const ControllerConfig& cfg);

/// One multiplier update from the latest observed output: error integration
/// followed by a rate-limited (v_sat) and clipped (mu_clip) exponential step.
ControllerState mu_step(const ControllerState& st, std::span<const double> R_k,
                        const ControllerConfig& cfg);

struct SetpointResult {
  ControllerState state;
  bool shrank = false;
};

/// Shrinks b to R_k when R_k dominates b and ell_k beats the running ell
/// minimum; always folds ell_k into that minimum. With smoothing enabled the
/// published b instead tracks the relaxed target r.
SetpointResult setpoint_step(const ControllerState& st,
                             std::span<const double> R_k, double ell_k,
                             std::uint64_t epoch, const ControllerConfig& cfg);

/// Numeric check of the reg-Pareto slider conditions on one consecutive pair
/// (d = 1 only). When all three conditions hold, the three margins are
/// guaranteed non-negative: reg decrease, ell increase, and the bound
/// mu_next*(R_prev - R_next) - (ell_next - ell_prev).
struct RegSlideReport {
  bool improve = false;      // penalized loss non-increasing under mu_next
  bool deteriorate = false;  // penalized loss non-decreasing under mu_prev
  bool mu_nondecreasing = false;
  bool slider_holds = false;  // all three above
  double reg_decrease = 0.0;
  double ell_increase = 0.0;
  double bound_margin = 0.0;
};

RegSlideReport regslide_check(const ObjectiveVector& prev, double mu_prev,
                              const ObjectiveVector& next, double mu_next);

/// Accumulated-change diagnostic for one regularization component of a trace.
/// Steps k run from 0 to n-2; step k joins k_greater when the penalized loss
/// under mu^(k) did not improve. The bound ell(end) <= ell(start) + S_> + S_<
/// is certified on the longest run of steps satisfying the per-step
/// hypothesis (improve under mu^(k+1), with mu non-decreasing).
struct EllBoundComponent {
  std::vector<std::uint64_t> k_greater;
  double s_greater = 0.0;
  double s_less = 0.0;
  double s_less_pos = 0.0;  // ell-ascent part of s_less
  double s_less_neg = 0.0;  // ell-descent part of s_less
  std::vector<std::uint64_t> hypothesis_violations;
  bool all_hypothesis_hold = false;
  double full_bound_slack = 0.0;  // ell(0) + S_> + S_< - ell(B)
  std::uint64_t segment_begin = 0;  // longest hypothesis-satisfying segment,
  std::uint64_t segment_end = 0;    // epochs [begin, end], empty if equal
  double segment_slack = 0.0;
  bool segment_bound_holds = false;
};

struct EllBoundReport {
  std::vector<EllBoundComponent> components;  // one per regularization term
};

EllBoundReport ellbound_diagnostic(const Trace& trace);

}  // namespace mhof
