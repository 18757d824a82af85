#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mhof/pareto.hpp"
#include "mhof/plant.hpp"
#include "mhof/rng.hpp"

using namespace mhof;
using doctest::Approx;

namespace {

constexpr double kGradRelTol = 1e-5;  // analytic vs central differences
constexpr double kZeroTol = 1e-10;    // gradient at the exact minimizer

double penalized(const ProblemSpec& prob, const ModelParams& params,
                 const std::vector<double>& mu) {
  const ObjectiveVector o = evaluate(prob, params);
  double value = o.ell;
  for (std::size_t i = 0; i < mu.size(); ++i) value += mu[i] * o.reg[i];
  return value;
}

// Central finite differences of the penalized loss, h = 1e-6 * (1 + |theta_i|).
std::vector<double> fd_gradient(const ProblemSpec& prob, const ModelParams& params,
                                const std::vector<double>& mu) {
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(params.theta[i]));
    ModelParams plus = params, minus = params;
    plus.theta[i] += h;
    minus.theta[i] -= h;
    grad[i] = (penalized(prob, plus, mu) - penalized(prob, minus, mu)) / (2.0 * h);
  }
  return grad;
}

void check_gradient_matches_fd(const ProblemSpec& prob, const ModelParams& params,
                               const std::vector<double>& mu) {
  const std::vector<double> analytic = grad_penalized(prob, params, mu);
  const std::vector<double> numeric = fd_gradient(prob, params, mu);
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({1.0, std::abs(analytic[i]), std::abs(numeric[i])});
    INFO("coordinate ", i, ": analytic=", analytic[i], " fd=", numeric[i]);
    CHECK(std::abs(analytic[i] - numeric[i]) <= kGradRelTol * scale);
  }
}

}  // namespace

TEST_SUITE("plant") {

TEST_CASE("quadratic evaluation has the closed scalar form") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.0}, {{2.0}});
  const ObjectiveVector at_one = evaluate(prob, ModelParams{{1.0}});
  CHECK(at_one.ell == 0.5);
  REQUIRE(at_one.reg.size() == 1);
  CHECK(at_one.reg[0] == 0.5);

  const ProblemSpec p3 = ProblemSpec::quadratic({0.5, -1.0, 2.0},
                                                {{2.0, 1.0, 0.0}});
  const ObjectiveVector at_anchor = evaluate(p3, ModelParams{{0.5, -1.0, 2.0}});
  CHECK(at_anchor.ell == 0.0);
  CHECK(at_anchor.reg[0] > 0.0);
}

TEST_CASE("quadratic problems reject degenerate geometry and bad shapes") {
  CHECK_THROWS_AS(ProblemSpec::quadratic({1.0}, {{1.0}}), ConfigError);
  CHECK_THROWS_AS(ProblemSpec::quadratic({0.0}, {{2.0}, {2.0}}), ConfigError);
  CHECK_THROWS_AS(ProblemSpec::quadratic({0.0}, {{2.0, 1.0}}), DimensionError);
  CHECK_THROWS_AS(ProblemSpec::quadratic({0.0}, {}), ConfigError);

  const ProblemSpec prob = ProblemSpec::quadratic({0.0}, {{2.0}});
  CHECK_THROWS_AS((void)evaluate(prob, ModelParams{{1.0, 2.0}}), DimensionError);
}

TEST_CASE("non-finite parameters raise a numeric error naming the term") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.0}, {{2.0}});
  try {
    (void)evaluate(prob, ModelParams{{std::numeric_limits<double>::infinity()}});
    FAIL("expected NumericError");
  } catch (const NumericError& err) {
    CHECK(std::string(err.what()).find("ell") != std::string::npos);
  }
}

TEST_CASE("gradient vanishes at the penalized minimizer") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.5, -1.0}, {{2.0, 1.0}, {-1.0, 0.0}});
  const std::vector<double> mu{0.7, 2.5};
  // theta* = (a + sum mu_i c_i) / (1 + sum mu_i)
  const double denom = 1.0 + mu[0] + mu[1];
  ModelParams at_min{{(0.5 + 0.7 * 2.0 + 2.5 * -1.0) / denom,
                      (-1.0 + 0.7 * 1.0 + 2.5 * 0.0) / denom}};
  for (double g : grad_penalized(prob, at_min, mu)) {
    CHECK(std::abs(g) <= kZeroTol);
  }
}

TEST_CASE("scalar gradient example") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.0}, {{2.0}});
  const std::vector<double> grad =
      grad_penalized(prob, ModelParams{{0.0}}, std::vector<double>{1.0});
  REQUIRE(grad.size() == 1);
  CHECK(grad[0] == -2.0);  // (0-0) + 1*(0-2)

  CHECK_THROWS_AS((void)grad_penalized(prob, ModelParams{{0.0}},
                                       std::vector<double>{1.0, 2.0}),
                  DimensionError);
}

TEST_CASE("quadratic gradients match central finite differences on 100 draws") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.5, -1.0, 2.0},
                                                  {{2.0, 1.0, 0.0}, {-1.0, 0.0, 1.0}});
  for (std::uint64_t draw = 0; draw < 100; ++draw) {
    const std::uint64_t stream = derive_stream(4000 + draw, 3);
    ModelParams params{{2.0 * normal01(stream, 0), 2.0 * normal01(stream, 1),
                        2.0 * normal01(stream, 2)}};
    const std::vector<double> mu{0.05 + 5.0 * uniform01(stream, 50),
                                 0.05 + 5.0 * uniform01(stream, 51)};
    check_gradient_matches_fd(prob, params, mu);
  }
}

TEST_CASE("network gradients match central finite differences on 100 draws") {
  const ProblemSpec prob = ProblemSpec::toy_mlp(8, 0, 50);
  for (std::uint64_t draw = 0; draw < 100; ++draw) {
    const ModelParams params = init_params(prob, 500 + draw);
    const std::uint64_t stream = derive_stream(9000 + draw, 4);
    const std::vector<double> mu{0.5 * uniform01(stream, 0) + 0.01,
                                 0.2 * uniform01(stream, 1) + 0.01,
                                 2.0 * uniform01(stream, 2) + 0.01};
    check_gradient_matches_fd(prob, params, mu);
  }
}

TEST_CASE("network terms at all-zero weights") {
  const ProblemSpec prob = ProblemSpec::toy_mlp(8, 0, 200);
  const ModelParams zeros{std::vector<double>(prob.param_count(), 0.0)};
  const ObjectiveVector o = evaluate(prob, zeros);
  REQUIRE(o.reg.size() == 3);
  CHECK(o.reg[0] == 0.0);                              // L2 of zero weights
  CHECK(o.reg[1] == Approx(32.0 * 1e-4).epsilon(1e-12));  // smoothed L1 floor
  CHECK(o.reg[2] == 0.0);                              // zero activations
  CHECK(o.ell == Approx(std::log(2.0)).epsilon(1e-12));  // uniform softmax
}

TEST_CASE("network dataset and initialization are pure functions of the seed") {
  const ProblemSpec a = ProblemSpec::toy_mlp(8, 0, 200);
  const ProblemSpec b = ProblemSpec::toy_mlp(8, 0, 200);
  const ProblemSpec other = ProblemSpec::toy_mlp(8, 1, 200);
  CHECK(digest(a) == digest(b));
  CHECK(digest(a) != digest(other));

  const ModelParams pa = init_params(a, 3);
  const ModelParams pb = init_params(b, 3);
  CHECK(pa.theta == pb.theta);
  CHECK(pa.theta != init_params(a, 4).theta);

  const ObjectiveVector oa = evaluate(a, pa);
  const ObjectiveVector ob = evaluate(b, pb);
  CHECK(oa == ob);
  CHECK(evaluate(other, pa).ell != oa.ell);  // different dataset
}

TEST_CASE("sgd applies the plain descent rule") {
  const OptimizerState sgd = OptimizerState::make_sgd(0.1);
  auto [next_opt, next] =
      optimizer_step(sgd, ModelParams{{1.0}}, std::vector<double>{2.0});
  REQUIRE(next.theta.size() == 1);
  CHECK(next.theta[0] == 1.0 - 0.1 * 2.0);
  CHECK(next.theta[0] == Approx(0.8).epsilon(1e-15));
  CHECK(next_opt.t == 0);  // sgd keeps no accumulators

  auto [unused, same] =
      optimizer_step(sgd, ModelParams{{1.0}}, std::vector<double>{0.0});
  CHECK(same.theta == std::vector<double>{1.0});
}

TEST_CASE("adam's first bias-corrected step has magnitude close to lr") {
  const OptimizerState adam = OptimizerState::make_adam(0.01);
  auto [next_opt, next] =
      optimizer_step(adam, ModelParams{{0.0, 0.0}}, std::vector<double>{3.0, -0.2});
  CHECK(next_opt.t == 1);
  CHECK(next.theta[0] == Approx(-0.01).epsilon(1e-6));
  CHECK(next.theta[1] == Approx(0.01).epsilon(1e-4));  // |g| near the epsilon floor
  CHECK(std::abs(next.theta[0]) <= 0.01 + 1e-9);

  // accumulators sized for a different problem are rejected
  OptimizerState stale = next_opt;
  CHECK_THROWS_AS((void)optimizer_step(stale, ModelParams{{0.0}},
                                       std::vector<double>{1.0}),
                  DimensionError);
}

TEST_CASE("optimizer construction validates the step size") {
  CHECK_THROWS_AS(OptimizerState::make_sgd(0.0), ConfigError);
  CHECK_THROWS_AS(OptimizerState::make_adam(-0.1), ConfigError);
}

TEST_CASE("an epoch with one inner step is a single optimizer step") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.0, 0.0}, {{3.0, 1.0}});
  const ModelParams params = init_params(prob, 0);
  const std::vector<double> mu{1.0};
  const OptimizerState adam = OptimizerState::make_adam(0.05);

  auto [opt_a, theta_a] = epoch(prob, adam, params, mu, 1);
  auto [opt_b, theta_b] =
      optimizer_step(adam, params, grad_penalized(prob, params, mu));
  CHECK(theta_a.theta == theta_b.theta);
  CHECK(opt_a.m == opt_b.m);
  CHECK(opt_a.v == opt_b.v);
  CHECK(opt_a.t == opt_b.t);

  CHECK_THROWS_AS((void)epoch(prob, adam, params, mu, 0), ConfigError);
}

TEST_CASE("admissible sgd strictly descends the penalized quadratic") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.0, 0.0}, {{3.0, 1.0}});
  const std::vector<double> mu{1.0};
  // contraction factor |1 - lr * (1 + sum mu)| = |1 - 0.3 * 2| < 1
  OptimizerState opt = OptimizerState::make_sgd(0.3);
  ModelParams params = init_params(prob, 1);
  double last = penalized(prob, params, mu);
  for (int k = 0; k < 50; ++k) {
    auto [next_opt, next_params] = epoch(prob, opt, params, mu, 5);
    opt = next_opt;
    params = next_params;
    const double now = penalized(prob, params, mu);
    CHECK(now < last + 1e-15);
    last = now;
  }
}

TEST_CASE("a vanishing multiplier drives the parameters to the anchor") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.5, -1.0}, {{3.0, 1.0}});
  const std::vector<double> mu{1e-12};
  OptimizerState opt = OptimizerState::make_sgd(0.1);
  ModelParams params = init_params(prob, 2);
  auto [next_opt, converged] = epoch(prob, opt, params, mu, 1000);
  const double dist = std::hypot(converged.theta[0] - 0.5, converged.theta[1] + 1.0);
  CHECK(dist < 1e-3);
}

TEST_CASE("sweeping the multiplier traces a mutually non-dominated front") {
  const ProblemSpec prob = ProblemSpec::quadratic({0.0, 0.0}, {{3.0, 1.0}});
  const std::vector<double> anchor{0.0, 0.0};
  const std::vector<double> center{3.0, 1.0};

  Archive arch;
  std::size_t count = 0;
  for (double mu = 1.0 / 64.0; mu <= 64.0; mu *= 2.0) {
    // closed-form minimizer, a convex combination of anchor and center
    const double t = mu / (1.0 + mu);
    ModelParams at_min{{anchor[0] + t * (center[0] - anchor[0]),
                        anchor[1] + t * (center[1] - anchor[1])}};
    CHECK(t > 0.0);
    CHECK(t < 1.0);
    for (double g : grad_penalized(prob, at_min, std::vector<double>{mu})) {
      CHECK(std::abs(g) <= kZeroTol);
    }
    arch.append(evaluate(prob, at_min));
    ++count;
  }
  CHECK(pareto_filter(arch).size() == count);  // nothing dominated
}

}  // TEST_SUITE("plant")
