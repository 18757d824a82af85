#include "mhof/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mhof {

namespace {

constexpr double kBoundSlack = 1e-9;  // rounding allowance on the ell bound

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(got) + " vs " + std::to_string(want) +
                         ")");
  }
}

void require_open_unit(double x, const char* field) {
  if (!(x > 0.0 && x < 1.0)) {
    throw ConfigError(std::string(field) + ": must lie in (0, 1)");
  }
}

void require_closed_unit(double x, const char* field) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ConfigError(std::string(field) + ": must lie in [0, 1]");
  }
}

}  // namespace

void ControllerConfig::validate(std::span<const double> mu0) const {
  require_open_unit(rho, "rho");
  require_open_unit(eta, "eta");
  if (!(v_sat > 0.0)) throw ConfigError("v_sat: must be positive");
  if (!(mu_clip > 0.0)) throw ConfigError("mu_clip: must be positive");
  require_closed_unit(xi_d, "xi_d");
  require_closed_unit(xi_o, "xi_o");
  require_closed_unit(xi_r, "xi_r");
  if (mu0.empty()) throw ConfigError("mu0: must have at least one component");
  for (double m : mu0) {
    if (!(m > 0.0)) throw ConfigError("mu0: every component must be positive");
    if (m > mu_clip) throw ConfigError("mu0: component exceeds mu_clip");
  }
}

ControllerState controller_init(std::span<const double> R0, double ell0,
                                std::span<const double> mu0,
                                const ControllerConfig& cfg) {
  cfg.validate(mu0);
  require_dim(R0.size(), mu0.size(), "controller_init");
  for (double r : R0) {
    if (!std::isfinite(r)) throw NumericError("controller_init: R0 not finite");
  }
  if (!std::isfinite(ell0)) throw NumericError("controller_init: ell0 not finite");

  const std::size_t d = R0.size();
  ControllerState st;
  st.mu.assign(mu0.begin(), mu0.end());
  st.b.resize(d);
  st.gain.resize(d);
  st.delta_i.assign(d, 0.0);
  st.ell_min = ell0;
  for (std::size_t i = 0; i < d; ++i) {
    st.b[i] = cfg.rho * R0[i];
    const double delta0 = R0[i] - st.b[i];
    if (delta0 == 0.0) {
      st.gain[i] = cfg.eta * cfg.v_sat / 1e-12;
      st.degenerate_gain = true;
    } else {
      st.gain[i] = cfg.eta * cfg.v_sat / delta0;
    }
  }
  st.out_smooth.assign(R0.begin(), R0.end());
  st.target_smooth = st.b;
  return st;
}

ControllerState mu_step(const ControllerState& st, std::span<const double> R_k,
                        const ControllerConfig& cfg) {
  const std::size_t d = st.dim();
  require_dim(R_k.size(), d, "mu_step");

  ControllerState next = st;
  for (std::size_t i = 0; i < d; ++i) {
    double observed = R_k[i];
    if (cfg.smoothing_enabled) {
      next.out_smooth[i] = cfg.xi_o * st.out_smooth[i] + (1.0 - cfg.xi_o) * R_k[i];
      observed = next.out_smooth[i];
    }
    const double e = observed - st.b[i];
    next.delta_i[i] = (1.0 - cfg.xi_d) * st.delta_i[i] + cfg.xi_d * e;
    const double exponent =
        std::clamp(st.gain[i] * next.delta_i[i], -cfg.v_sat, cfg.v_sat);
    next.mu[i] = std::min(st.mu[i] * std::exp(exponent), cfg.mu_clip);
  }
  return next;
}

SetpointResult setpoint_step(const ControllerState& st,
                             std::span<const double> R_k, double ell_k,
                             std::uint64_t epoch, const ControllerConfig& cfg) {
  const std::size_t d = st.dim();
  require_dim(R_k.size(), d, "setpoint_step");
  if (epoch < 1) throw SequencingError("setpoint_step: epoch must be >= 1");

  SetpointResult res;
  res.state = st;
  res.shrank = dominates(R_k, st.b) && ell_k < st.ell_min;
  res.state.ell_min = std::min(st.ell_min, ell_k);
  if (res.shrank) {
    res.state.shrink_epochs.push_back(epoch);
    if (!cfg.smoothing_enabled) {
      res.state.b.assign(R_k.begin(), R_k.end());
    }
  }
  if (cfg.smoothing_enabled) {
    // The relaxed target chases the smoothed output held by the controller
    // (one epoch behind the raw observation); b publishes that target.
    for (std::size_t i = 0; i < d; ++i) {
      res.state.target_smooth[i] =
          cfg.xi_r * st.target_smooth[i] + (1.0 - cfg.xi_r) * st.out_smooth[i];
      res.state.b[i] = res.state.target_smooth[i];
    }
  }
  return res;
}

RegSlideReport regslide_check(const ObjectiveVector& prev, double mu_prev,
                              const ObjectiveVector& next, double mu_next) {
  if (prev.dim() != 1 || next.dim() != 1) {
    throw DimensionError("regslide_check: supported for d = 1 only");
  }
  const double r_prev = prev.reg[0];
  const double r_next = next.reg[0];

  RegSlideReport rep;
  rep.improve = next.ell + mu_next * r_next <= prev.ell + mu_next * r_prev;
  rep.deteriorate = next.ell + mu_prev * r_next >= prev.ell + mu_prev * r_prev;
  rep.mu_nondecreasing = mu_next >= mu_prev;
  rep.slider_holds = rep.improve && rep.deteriorate && rep.mu_nondecreasing;
  rep.reg_decrease = r_prev - r_next;
  rep.ell_increase = next.ell - prev.ell;
  rep.bound_margin = mu_next * (r_prev - r_next) - (next.ell - prev.ell);
  return rep;
}

EllBoundReport ellbound_diagnostic(const Trace& trace) {
  const auto& ep = trace.epochs();
  if (ep.size() < 2) {
    throw ConfigError("ellbound_diagnostic: trace needs at least 2 epochs");
  }
  const std::size_t d = trace.meta().d;
  const std::size_t steps = ep.size() - 1;

  EllBoundReport report;
  report.components.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    auto& comp = report.components[i];
    std::vector<bool> hyp(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const double ell0 = ep[k].ell, ell1 = ep[k + 1].ell;
      const double r0 = ep[k].reg[i], r1 = ep[k + 1].reg[i];
      const double mu0 = ep[k].mu[i], mu1 = ep[k + 1].mu[i];

      const bool deteriorate = ell1 + mu0 * r1 >= ell0 + mu0 * r0;
      const bool improve = ell1 + mu1 * r1 <= ell0 + mu1 * r0;
      hyp[k] = improve && mu1 >= mu0;
      if (!hyp[k]) comp.hypothesis_violations.push_back(k);

      if (deteriorate) {
        comp.k_greater.push_back(k);
        comp.s_greater += mu1 * (r0 - r1);
      } else {
        const double term = mu0 * (r0 - r1);
        comp.s_less += term;
        if (ell1 >= ell0) {
          comp.s_less_pos += term;
        } else {
          comp.s_less_neg += term;
        }
      }
    }
    comp.all_hypothesis_hold = comp.hypothesis_violations.empty();
    comp.full_bound_slack =
        ep.front().ell + comp.s_greater + comp.s_less - ep.back().ell;

    // Longest run of consecutive hypothesis-satisfying steps (earliest wins).
    std::size_t best_begin = 0, best_len = 0, run_begin = 0, run_len = 0;
    for (std::size_t k = 0; k < steps; ++k) {
      if (hyp[k]) {
        if (run_len == 0) run_begin = k;
        ++run_len;
        if (run_len > best_len) {
          best_len = run_len;
          best_begin = run_begin;
        }
      } else {
        run_len = 0;
      }
    }
    comp.segment_begin = best_begin;
    comp.segment_end = best_begin + best_len;
    double s_seg = 0.0;
    for (std::size_t k = best_begin; k < best_begin + best_len; ++k) {
      const double r0 = ep[k].reg[i], r1 = ep[k + 1].reg[i];
      const double mu0 = ep[k].mu[i], mu1 = ep[k + 1].mu[i];
      const bool deteriorate = ep[k + 1].ell + mu0 * r1 >= ep[k].ell + mu0 * r0;
      s_seg += deteriorate ? mu1 * (r0 - r1) : mu0 * (r0 - r1);
    }
    comp.segment_slack =
        ep[comp.segment_begin].ell + s_seg - ep[comp.segment_end].ell;
    comp.segment_bound_holds = comp.segment_slack >= -kBoundSlack;
  }
  return report;
}

}  // namespace mhof
