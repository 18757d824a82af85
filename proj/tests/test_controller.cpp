#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mhof/controller.hpp"
#include "mhof/rng.hpp"
#include "mhof/trace.hpp"

using namespace mhof;
using doctest::Approx;

namespace {

constexpr double kTight = 1e-12;     // relative, for directly computed values
constexpr double kRateSlack = 1e-9;  // absolute, for exp/log round-trips

TraceMeta tiny_meta(std::uint64_t d, std::uint64_t budget) {
  TraceMeta meta;
  meta.problem_digest = "test-problem";
  meta.scheme_digest = "test-scheme";
  meta.seed = 0;
  meta.d = d;
  meta.budget = budget;
  return meta;
}

EpochRecord rec(std::uint64_t k, double ell, std::vector<double> reg,
                std::vector<double> mu) {
  EpochRecord r;
  r.k = k;
  r.ell = ell;
  r.reg = std::move(reg);
  r.mu = std::move(mu);
  r.b = std::vector<double>(r.reg.size(), 0.0);
  return r;
}

}  // namespace

TEST_SUITE("controller") {

TEST_CASE("config validation names the offending field") {
  ControllerConfig cfg;
  const std::vector<double> mu0{1.0};
  cfg.validate(mu0);  // defaults are valid

  auto expect_reject = [&](ControllerConfig bad, const std::vector<double>& mu,
                           const std::string& field) {
    try {
      bad.validate(mu);
      FAIL("expected ConfigError for ", field);
    } catch (const ConfigError& err) {
      CHECK(std::string(err.what()).find(field) != std::string::npos);
    }
  };

  ControllerConfig bad = cfg;
  bad.rho = 0.0;
  expect_reject(bad, mu0, "rho");
  bad = cfg;
  bad.rho = 1.0;
  expect_reject(bad, mu0, "rho");
  bad = cfg;
  bad.eta = 1.0;
  expect_reject(bad, mu0, "eta");
  bad = cfg;
  bad.v_sat = 0.0;
  expect_reject(bad, mu0, "v_sat");
  bad = cfg;
  bad.mu_clip = -1.0;
  expect_reject(bad, mu0, "mu_clip");
  bad = cfg;
  bad.xi_d = 1.5;
  expect_reject(bad, mu0, "xi_d");
  bad = cfg;
  bad.xi_o = -0.1;
  expect_reject(bad, mu0, "xi_o");
  bad = cfg;
  bad.xi_r = 2.0;
  expect_reject(bad, mu0, "xi_r");
  expect_reject(cfg, {0.0}, "mu0");
  expect_reject(cfg, {-2.0}, "mu0");
  expect_reject(cfg, {2e4}, "mu0");  // above mu_clip
  expect_reject(cfg, {}, "mu0");
}

TEST_CASE("init places the setpoint and normalizes the gain") {
  ControllerConfig cfg;
  cfg.rho = 0.99;
  cfg.eta = 0.5;
  cfg.v_sat = 1.0;

  const ControllerState st = controller_init(std::vector<double>{10.0}, 3.0,
                                             std::vector<double>{1.0}, cfg);
  REQUIRE(st.dim() == 1);
  CHECK(st.b[0] == Approx(9.9).epsilon(kTight));
  const double delta0 = 10.0 - st.b[0];
  CHECK(delta0 == Approx(0.1).epsilon(1e-9));
  CHECK(st.gain[0] == Approx(5.0).epsilon(1e-9));
  // gain normalization: K_I * delta0 = eta * v_sat
  CHECK(st.gain[0] * delta0 == Approx(cfg.eta * cfg.v_sat).epsilon(kTight));
  CHECK(st.delta_i[0] == 0.0);
  CHECK(st.ell_min == 3.0);
  CHECK_FALSE(st.degenerate_gain);
  CHECK(st.shrink_epochs.empty());

  ControllerConfig half;
  half.rho = 0.5;
  const ControllerState st2 = controller_init(std::vector<double>{4.0, 8.0}, 1.0,
                                              std::vector<double>{1.0, 1.0}, half);
  CHECK(st2.b == std::vector<double>{2.0, 4.0});
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(st2.gain[i] * (std::vector<double>{4.0, 8.0}[i] - st2.b[i]) ==
          Approx(half.eta * half.v_sat).epsilon(kTight));
  }
}

TEST_CASE("init flags a component that starts on its setpoint") {
  ControllerConfig cfg;
  const ControllerState st = controller_init(std::vector<double>{0.0, 2.0}, 1.0,
                                             std::vector<double>{1.0, 1.0}, cfg);
  CHECK(st.degenerate_gain);          // delta0 = (1-rho)*0 = 0
  CHECK(std::isfinite(st.gain[0]));   // epsilon fallback, no crash
  CHECK(st.gain[0] == Approx(cfg.eta * cfg.v_sat / 1e-12).epsilon(kTight));
}

TEST_CASE("mu_step follows the saturated exponential law") {
  ControllerConfig cfg;  // xi_d = 0.5, v_sat = 1, mu_clip = 1e4

  ControllerState st;
  st.mu = {1.0};
  st.b = {5.0};
  st.gain = {0.5};
  st.delta_i = {0.0};

  SUBCASE("zero error leaves mu untouched") {
    const ControllerState next = mu_step(st, std::vector<double>{5.0}, cfg);
    CHECK(next.mu[0] == 1.0);
    CHECK(next.delta_i[0] == 0.0);
  }

  SUBCASE("error moving average is a convex combination") {
    // xi_d = 0.5, delta_i = 0, e = 2 -> delta_i' = 1
    const ControllerState next = mu_step(st, std::vector<double>{7.0}, cfg);
    CHECK(next.delta_i[0] == 1.0);
    // K_I * delta_i' = 0.5 below the shoulder: mu' = exp(0.5)
    CHECK(next.mu[0] == std::exp(0.5));
    CHECK(next.mu[0] == Approx(1.64872).epsilon(1e-5));
  }

  SUBCASE("exponent saturates at v_sat") {
    st.gain = {50.0};
    const ControllerState next = mu_step(st, std::vector<double>{7.0}, cfg);
    CHECK(next.mu[0] == std::exp(1.0));  // clamped to +v_sat
    const ControllerState down = mu_step(st, std::vector<double>{-9.0}, cfg);
    CHECK(down.mu[0] == std::exp(-1.0));  // clamped to -v_sat
  }

  SUBCASE("mu_clip caps the multiplier") {
    st.mu = {9990.0};
    st.gain = {50.0};
    const ControllerState next = mu_step(st, std::vector<double>{7.0}, cfg);
    CHECK(next.mu[0] == cfg.mu_clip);
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS((void)mu_step(st, std::vector<double>{1.0, 2.0}, cfg),
                    DimensionError);
  }
}

TEST_CASE("mu stays in (0, mu_clip] with per-step log-rate at most v_sat") {
  ControllerConfig cfg;
  cfg.mu_clip = 3.0;  // low cap so the clip actually engages
  const std::uint64_t seed = 77;

  ControllerState st = controller_init(std::vector<double>{2.0, 4.0}, 1.0,
                                       std::vector<double>{1.0, 0.5}, cfg);
  for (int k = 0; k < 300; ++k) {
    const std::vector<double> R{6.0 * uniform01(seed, 2 * k),
                                6.0 * uniform01(seed, 2 * k + 1)};
    const ControllerState next = mu_step(st, R, cfg);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(next.mu[i] > 0.0);
      CHECK(next.mu[i] <= cfg.mu_clip);
      CHECK(std::abs(std::log(next.mu[i]) - std::log(st.mu[i])) <=
            cfg.v_sat + kRateSlack);
    }
    st = next;
  }
}

TEST_CASE("mu moves with the sign of the error when the integrator agrees") {
  ControllerConfig cfg;
  ControllerState st;
  st.mu = {2.0};
  st.b = {1.0};
  st.gain = {0.7};

  st.delta_i = {0.4};  // e > 0, delta_i >= 0 -> pressure up
  CHECK(mu_step(st, std::vector<double>{1.5}, cfg).mu[0] >= st.mu[0]);
  st.delta_i = {0.0};
  CHECK(mu_step(st, std::vector<double>{1.5}, cfg).mu[0] >= st.mu[0]);

  st.delta_i = {-0.4};  // e < 0, delta_i <= 0 -> pressure down
  CHECK(mu_step(st, std::vector<double>{0.5}, cfg).mu[0] <= st.mu[0]);
  st.delta_i = {0.0};
  CHECK(mu_step(st, std::vector<double>{0.5}, cfg).mu[0] <= st.mu[0]);
}

TEST_CASE("mu_step is deterministic") {
  ControllerConfig cfg;
  const ControllerState st = controller_init(std::vector<double>{3.0}, 1.0,
                                             std::vector<double>{1.0}, cfg);
  const ControllerState a = mu_step(st, std::vector<double>{2.5}, cfg);
  const ControllerState b = mu_step(st, std::vector<double>{2.5}, cfg);
  CHECK(a.mu == b.mu);
  CHECK(a.delta_i == b.delta_i);
}

TEST_CASE("setpoint shrinks only on dominance plus a new ell minimum") {
  ControllerConfig cfg;
  ControllerState st;
  st.mu = {1.0};
  st.b = {4.0};
  st.gain = {1.0};
  st.delta_i = {0.0};
  st.ell_min = 1.0;

  SUBCASE("output above the setpoint never shrinks") {
    const SetpointResult res = setpoint_step(st, std::vector<double>{5.0}, 0.5, 1, cfg);
    CHECK_FALSE(res.shrank);
    CHECK(res.state.b == std::vector<double>{4.0});
  }

  SUBCASE("dominance with a new minimum commits the output") {
    const SetpointResult res = setpoint_step(st, std::vector<double>{3.0}, 0.5, 1, cfg);
    CHECK(res.shrank);
    CHECK(res.state.b == std::vector<double>{3.0});
    CHECK(res.state.ell_min == 0.5);
    CHECK(res.state.shrink_epochs == std::vector<std::uint64_t>{1});
  }

  SUBCASE("dominance without a new minimum leaves the setpoint") {
    const SetpointResult res = setpoint_step(st, std::vector<double>{3.0}, 2.0, 1, cfg);
    CHECK_FALSE(res.shrank);
    CHECK(res.state.b == std::vector<double>{4.0});
    CHECK(res.state.ell_min == 1.0);
  }

  SUBCASE("the ell minimum runs over all epochs, not only shrink epochs") {
    // A non-dominating epoch with a tiny ell still tightens the minimum...
    const SetpointResult low = setpoint_step(st, std::vector<double>{5.0}, 0.2, 1, cfg);
    CHECK_FALSE(low.shrank);
    CHECK(low.state.ell_min == 0.2);
    // ...so a later dominating epoch above that minimum cannot shrink...
    const SetpointResult blocked =
        setpoint_step(low.state, std::vector<double>{3.0}, 0.5, 2, cfg);
    CHECK_FALSE(blocked.shrank);
    // ...but one below it can.
    const SetpointResult ok =
        setpoint_step(low.state, std::vector<double>{3.0}, 0.1, 3, cfg);
    CHECK(ok.shrank);
    CHECK(ok.state.shrink_epochs == std::vector<std::uint64_t>{3});
  }

  SUBCASE("epoch 0 is not a valid adaptation step") {
    CHECK_THROWS_AS((void)setpoint_step(st, std::vector<double>{3.0}, 0.5, 0, cfg),
                    SequencingError);
  }
}

TEST_CASE("setpoint is componentwise non-increasing without smoothing") {
  ControllerConfig cfg;
  const std::uint64_t seed = 31;
  ControllerState st = controller_init(std::vector<double>{3.0, 5.0}, 2.0,
                                       std::vector<double>{1.0, 1.0}, cfg);
  std::vector<double> prev_b = st.b;
  for (std::uint64_t k = 1; k <= 200; ++k) {
    const std::vector<double> R{6.0 * uniform01(seed, 3 * k),
                                6.0 * uniform01(seed, 3 * k + 1)};
    const double ell = 4.0 * uniform01(seed, 3 * k + 2);
    st = mu_step(st, R, cfg);
    st = setpoint_step(st, R, ell, k, cfg).state;
    for (std::size_t i = 0; i < 2; ++i) CHECK(st.b[i] <= prev_b[i]);
    prev_b = st.b;
  }
}

TEST_CASE("smoothing relaxes both the observation and the target") {
  ControllerConfig cfg;
  cfg.smoothing_enabled = true;
  cfg.xi_o = 0.1;
  cfg.xi_r = 0.9;

  ControllerState st = controller_init(std::vector<double>{10.0}, 1.0,
                                       std::vector<double>{1.0}, cfg);
  CHECK(st.out_smooth == std::vector<double>{10.0});
  CHECK(st.target_smooth == st.b);
  const double b0 = st.b[0];

  // observation smoothing: O_R' = xi_o * O_R + (1 - xi_o) * R_k
  const ControllerState after_mu = mu_step(st, std::vector<double>{8.0}, cfg);
  CHECK(after_mu.out_smooth[0] == 0.1 * 10.0 + 0.9 * 8.0);
  // the error uses the smoothed observation
  CHECK(after_mu.delta_i[0] == Approx(0.5 * (after_mu.out_smooth[0] - b0)).epsilon(kTight));

  // target smoothing: r' = xi_r * r + (1 - xi_r) * O_R, published as b
  const SetpointResult sp = setpoint_step(after_mu, std::vector<double>{8.0}, 0.5, 1, cfg);
  const double expected_target = 0.9 * b0 + 0.1 * after_mu.out_smooth[0];
  CHECK(sp.state.target_smooth[0] == Approx(expected_target).epsilon(kTight));
  CHECK(sp.state.b[0] == sp.state.target_smooth[0]);
  // the shrink event is still detected and recorded
  CHECK(sp.shrank);
  CHECK(sp.state.shrink_epochs == std::vector<std::uint64_t>{1});
}

TEST_CASE("regslide reports the slider conditions and margins") {
  SUBCASE("degenerate equality satisfies the slider with zero margins") {
    const RegSlideReport rep = regslide_check(ObjectiveVector(1.0, {1.0}), 1.0,
                                              ObjectiveVector(1.0, {1.0}), 1.0);
    CHECK(rep.improve);
    CHECK(rep.deteriorate);
    CHECK(rep.mu_nondecreasing);
    CHECK(rep.slider_holds);
    CHECK(rep.reg_decrease == 0.0);
    CHECK(rep.ell_increase == 0.0);
    CHECK(rep.bound_margin == 0.0);
  }

  SUBCASE("a step that still improves under the old mu is not a slide") {
    // improve: 1.2 + 2*1.5 = 4.2 <= 1 + 2*2 = 5; deteriorate: 2.7 >= 3 fails
    const RegSlideReport rep = regslide_check(ObjectiveVector(1.0, {2.0}), 1.0,
                                              ObjectiveVector(1.2, {1.5}), 2.0);
    CHECK(rep.improve);
    CHECK_FALSE(rep.deteriorate);
    CHECK(rep.mu_nondecreasing);
    CHECK_FALSE(rep.slider_holds);
  }

  SUBCASE("a decreasing multiplier fails the check without throwing") {
    const RegSlideReport rep = regslide_check(ObjectiveVector(1.0, {2.0}), 2.0,
                                              ObjectiveVector(1.0, {2.0}), 1.0);
    CHECK_FALSE(rep.mu_nondecreasing);
    CHECK_FALSE(rep.slider_holds);
  }

  SUBCASE("only scalar regularization is supported") {
    CHECK_THROWS_AS((void)regslide_check(ObjectiveVector(1.0, {1.0, 1.0}), 1.0,
                                         ObjectiveVector(1.0, {1.0, 1.0}), 2.0),
                    DimensionError);
  }
}

TEST_CASE("slider margins are non-negative on exact penalized minimizers") {
  // Scalar quadratic ell = theta^2/2, reg = (theta-2)^2/2: the minimizer of
  // ell + mu*reg is theta*(mu) = 2mu/(1+mu). Consecutive minimizers under an
  // increasing mu satisfy the slider by construction.
  auto at = [](double mu) {
    const double theta = 2.0 * mu / (1.0 + mu);
    return ObjectiveVector(0.5 * theta * theta,
                           {0.5 * (theta - 2.0) * (theta - 2.0)});
  };
  const std::vector<double> mus{0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  int checked = 0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    for (std::size_t j = i + 1; j < mus.size(); ++j) {
      const RegSlideReport rep = regslide_check(at(mus[i]), mus[i], at(mus[j]), mus[j]);
      CHECK(rep.slider_holds);
      CHECK(rep.reg_decrease >= -kRateSlack);
      CHECK(rep.ell_increase >= -kRateSlack);
      CHECK(rep.bound_margin >= -kRateSlack);
      ++checked;
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("ellbound on a constant trace holds with equality") {
  std::vector<EpochRecord> records;
  for (std::uint64_t k = 0; k < 3; ++k) records.push_back(rec(k, 1.0, {1.0}, {1.0}));
  const Trace trace = Trace::from_records(tiny_meta(1, 2), std::move(records));

  const EllBoundReport report = ellbound_diagnostic(trace);
  REQUIRE(report.components.size() == 1);
  const EllBoundComponent& c = report.components[0];
  CHECK(c.s_greater == 0.0);
  CHECK(c.s_less == 0.0);
  CHECK(c.k_greater.size() == 2);  // equality counts as non-improvement
  CHECK(c.all_hypothesis_hold);
  CHECK(c.hypothesis_violations.empty());
  CHECK(c.full_bound_slack == 0.0);
  CHECK(c.segment_begin == 0);
  CHECK(c.segment_end == 2);
  CHECK(c.segment_bound_holds);
}

TEST_CASE("ellbound classifies a slide step and certifies the bound") {
  // mu: 1 -> 2, R: 2 -> 1, ell: 1 -> 1.5. Under the old mu the penalized loss
  // improves (2.5 < 3), so the step belongs to the other partition and its
  // contribution is mu^(k) * (R^(k) - R^(k+1)) = 1.
  std::vector<EpochRecord> records;
  records.push_back(rec(0, 1.0, {2.0}, {1.0}));
  records.push_back(rec(1, 1.5, {1.0}, {2.0}));
  const Trace trace = Trace::from_records(tiny_meta(1, 1), std::move(records));

  const EllBoundReport report = ellbound_diagnostic(trace);
  REQUIRE(report.components.size() == 1);
  const EllBoundComponent& c = report.components[0];
  CHECK(c.k_greater.empty());
  CHECK(c.s_greater == 0.0);
  CHECK(c.s_less == 1.0);
  CHECK(c.s_less_pos == 1.0);  // the ell-ascent share
  CHECK(c.s_less_neg == 0.0);
  CHECK(c.all_hypothesis_hold);  // improve under mu'=2 and mu non-decreasing
  // ell(B) = 1.5 <= ell(0) + S_> + S_< = 2
  CHECK(c.full_bound_slack == Approx(0.5).epsilon(kTight));
  CHECK(c.segment_begin == 0);
  CHECK(c.segment_end == 1);
  CHECK(c.segment_bound_holds);
}

TEST_CASE("ellbound reports every regularization component") {
  std::vector<EpochRecord> records;
  records.push_back(rec(0, 1.0, {2.0, 4.0}, {1.0, 1.0}));
  records.push_back(rec(1, 1.5, {1.0, 3.0}, {2.0, 2.0}));
  const Trace trace = Trace::from_records(tiny_meta(2, 1), std::move(records));

  const EllBoundReport report = ellbound_diagnostic(trace);
  REQUIRE(report.components.size() == 2);
  for (const EllBoundComponent& c : report.components) {
    CHECK(c.s_less == 1.0);
    CHECK(c.segment_bound_holds);
  }
}

TEST_CASE("ellbound needs at least two epochs") {
  std::vector<EpochRecord> records;
  records.push_back(rec(0, 1.0, {1.0}, {1.0}));
  const Trace trace = Trace::from_records(tiny_meta(1, 1), std::move(records));
  CHECK_THROWS_AS((void)ellbound_diagnostic(trace), ConfigError);
}

}  // TEST_SUITE("controller")
