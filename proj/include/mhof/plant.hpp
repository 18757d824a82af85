#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mhof/errors.hpp"
#include "mhof/pareto.hpp"

namespace mhof {

struct ModelParams {
  std::vector<double> theta;

  std::size_t size() const { return theta.size(); }
};

/// ell = 0.5*||theta - anchor||^2, reg_i = 0.5*||theta - centers[i]||^2.
/// Anchor and centers must be pairwise distinct so the trade-off is real.
struct QuadraticSpec {
  std::vector<double> anchor;
  std::vector<std::vector<double>> centers;
};

/// One-hidden-layer tanh network with softmax cross-entropy on a fixed
/// two-blob dataset; three regularizers at different scales: 0.5*sum(w^2),
/// sum(sqrt(w^2 + 1e-8)) over weights only, and the mean squared hidden
/// activation. Parameter layout: [W1 (h x 2), b1 (h), W2 (2 x h), b2 (2)].
struct ToyMlpSpec {
  std::uint64_t hidden = 8;
  std::uint64_t dataset_seed = 0;
  std::uint64_t samples_per_class = 200;
};

class ProblemSpec {
 public:
  enum class Kind { quadratic, toy_mlp };

  static ProblemSpec quadratic(std::vector<double> anchor,
                               std::vector<std::vector<double>> centers);
  static ProblemSpec toy_mlp(std::uint64_t hidden, std::uint64_t dataset_seed,
                             std::uint64_t samples_per_class = 200);

  Kind kind() const;
  std::size_t param_count() const;  // length of theta
  std::size_t reg_count() const;    // number of regularization terms

  const QuadraticSpec& quadratic_spec() const;
  const ToyMlpSpec& mlp_spec() const;

 private:
  explicit ProblemSpec(std::variant<QuadraticSpec, ToyMlpSpec> spec);
  std::variant<QuadraticSpec, ToyMlpSpec> spec_;
};

/// Stable hex fingerprint of the full problem definition, for trace metas.
std::string digest(const ProblemSpec& prob);

/// Deterministic initial parameters: standard normal for the quadratic;
/// fan-in-scaled normal weights and zero biases for the MLP.
ModelParams init_params(const ProblemSpec& prob, std::uint64_t seed);

/// All loss terms at theta. Throws NumericError naming the first
/// non-finite term.
ObjectiveVector evaluate(const ProblemSpec& prob, const ModelParams& params);

/// Analytic gradient of ell + mu^T reg at theta.
std::vector<double> grad_penalized(const ProblemSpec& prob,
                                   const ModelParams& params,
                                   std::span<const double> mu);

struct OptimizerState {
  enum class Kind { sgd, adam };

  Kind kind = Kind::sgd;
  double lr = 0.01;
  std::vector<double> m;  // adam first moment, sized lazily on first step
  std::vector<double> v;  // adam second moment
  std::uint64_t t = 0;    // adam timestep

  static OptimizerState make_sgd(double lr);
  static OptimizerState make_adam(double lr);
};

std::pair<OptimizerState, ModelParams> optimizer_step(
    const OptimizerState& opt, const ModelParams& params,
    std::span<const double> grad);

/// inner_steps full-batch descent steps with mu held fixed.
std::pair<OptimizerState, ModelParams> epoch(const ProblemSpec& prob,
                                             const OptimizerState& opt,
                                             const ModelParams& params,
                                             std::span<const double> mu,
                                             std::uint64_t inner_steps);

}  // namespace mhof
