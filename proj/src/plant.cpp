#include "mhof/plant.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mhof/digest.hpp"
#include "mhof/rng.hpp"

namespace mhof {

namespace {

constexpr double kL1Eps = 1e-8;   // smoothing of |w|
constexpr double kAdamB1 = 0.9;
constexpr double kAdamB2 = 0.999;
constexpr double kAdamEps = 1e-8;

void require_theta(const ProblemSpec& prob, const ModelParams& params) {
  if (params.size() != prob.param_count()) {
    throw DimensionError("theta length " + std::to_string(params.size()) +
                         " does not match problem parameter count " +
                         std::to_string(prob.param_count()));
  }
}

void require_term_finite(double value, const std::string& term) {
  if (!std::isfinite(value)) {
    throw NumericError("evaluate: term " + term + " is non-finite");
  }
}

struct MlpLayout {
  std::uint64_t h;
  std::size_t w1, b1, w2, b2;  // offsets into theta
  std::size_t total;
};

MlpLayout layout_of(const ToyMlpSpec& spec) {
  MlpLayout lay{};
  lay.h = spec.hidden;
  lay.w1 = 0;
  lay.b1 = lay.w1 + 2 * spec.hidden;
  lay.w2 = lay.b1 + spec.hidden;
  lay.b2 = lay.w2 + 2 * spec.hidden;
  lay.total = lay.b2 + 2;
  return lay;
}

struct Dataset {
  std::vector<double> x;       // 2 coords per point
  std::vector<int> y;          // class labels
  std::size_t n;
};

// Two unit-variance Gaussian blobs centred at (-2, 0) and (+2, 0),
// reproducible from the seed alone.
Dataset make_dataset(const ToyMlpSpec& spec) {
  Dataset ds;
  ds.n = 2 * spec.samples_per_class;
  ds.x.resize(2 * ds.n);
  ds.y.resize(ds.n);
  for (std::size_t j = 0; j < ds.n; ++j) {
    const int label = j < spec.samples_per_class ? 0 : 1;
    const double cx = label == 0 ? -2.0 : 2.0;
    ds.y[j] = label;
    ds.x[2 * j] = cx + normal01(spec.dataset_seed, 2 * j);
    ds.x[2 * j + 1] = normal01(spec.dataset_seed, 2 * j + 1);
  }
  return ds;
}

struct MlpTerms {
  double ce;       // mean cross-entropy
  double r_l2;     // 0.5 * sum of squared weights
  double r_l1;     // smoothed L1 over weights
  double r_act;    // mean squared hidden activation
};

// Forward pass over the whole dataset; optionally accumulates gradients of
// ce + mu_act * r_act into grad (the data-dependent terms).
MlpTerms mlp_forward(const ToyMlpSpec& spec, std::span<const double> theta,
                     const Dataset& ds, double mu_act,
                     std::vector<double>* grad) {
  const MlpLayout lay = layout_of(spec);
  const std::size_t h = lay.h;
  const double n = static_cast<double>(ds.n);

  MlpTerms terms{0.0, 0.0, 0.0, 0.0};
  std::vector<double> a1(h), dz1(h);
  for (std::size_t s = 0; s < ds.n; ++s) {
    const double x0 = ds.x[2 * s], x1 = ds.x[2 * s + 1];
    for (std::size_t j = 0; j < h; ++j) {
      const double z = theta[lay.w1 + 2 * j] * x0 +
                       theta[lay.w1 + 2 * j + 1] * x1 + theta[lay.b1 + j];
      a1[j] = std::tanh(z);
      terms.r_act += a1[j] * a1[j];
    }
    double z2[2];
    for (std::size_t c = 0; c < 2; ++c) {
      double z = theta[lay.b2 + c];
      for (std::size_t j = 0; j < h; ++j) z += theta[lay.w2 + c * h + j] * a1[j];
      z2[c] = z;
    }
    const double zmax = std::max(z2[0], z2[1]);
    const double e0 = std::exp(z2[0] - zmax), e1 = std::exp(z2[1] - zmax);
    const double zsum = e0 + e1;
    const double p[2] = {e0 / zsum, e1 / zsum};
    terms.ce += -(z2[ds.y[s]] - zmax - std::log(zsum));

    if (grad) {
      double dz2[2] = {p[0] / n, p[1] / n};
      dz2[ds.y[s]] -= 1.0 / n;
      double da1;
      for (std::size_t j = 0; j < h; ++j) {
        da1 = theta[lay.w2 + j] * dz2[0] + theta[lay.w2 + h + j] * dz2[1];
        da1 += mu_act * 2.0 * a1[j] / (n * static_cast<double>(h));
        dz1[j] = da1 * (1.0 - a1[j] * a1[j]);
      }
      for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t j = 0; j < h; ++j) {
          (*grad)[lay.w2 + c * h + j] += dz2[c] * a1[j];
        }
        (*grad)[lay.b2 + c] += dz2[c];
      }
      for (std::size_t j = 0; j < h; ++j) {
        (*grad)[lay.w1 + 2 * j] += dz1[j] * x0;
        (*grad)[lay.w1 + 2 * j + 1] += dz1[j] * x1;
        (*grad)[lay.b1 + j] += dz1[j];
      }
    }
  }
  terms.ce /= n;
  terms.r_act /= n * static_cast<double>(h);

  // Weight-only penalties: W1 then W2, biases excluded.
  auto weight_terms = [&](std::size_t begin, std::size_t count) {
    for (std::size_t i = begin; i < begin + count; ++i) {
      const double w = theta[i];
      terms.r_l2 += 0.5 * w * w;
      terms.r_l1 += std::sqrt(w * w + kL1Eps);
    }
  };
  weight_terms(lay.w1, 2 * h);
  weight_terms(lay.w2, 2 * h);
  return terms;
}

}  // namespace

ProblemSpec::ProblemSpec(std::variant<QuadraticSpec, ToyMlpSpec> spec)
    : spec_(std::move(spec)) {}

ProblemSpec ProblemSpec::quadratic(std::vector<double> anchor,
                                   std::vector<std::vector<double>> centers) {
  if (anchor.empty()) throw ConfigError("quadratic: anchor must be non-empty");
  if (centers.empty()) throw ConfigError("quadratic: needs at least one center");
  for (const auto& c : centers) {
    if (c.size() != anchor.size()) {
      throw DimensionError("quadratic: center length differs from anchor");
    }
  }
  std::vector<const std::vector<double>*> pts{&anchor};
  for (const auto& c : centers) pts.push_back(&c);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (*pts[i] == *pts[j]) {
        throw ConfigError("quadratic: anchor and centers must be pairwise distinct");
      }
    }
  }
  return ProblemSpec(QuadraticSpec{std::move(anchor), std::move(centers)});
}

ProblemSpec ProblemSpec::toy_mlp(std::uint64_t hidden, std::uint64_t dataset_seed,
                                 std::uint64_t samples_per_class) {
  if (hidden == 0) throw ConfigError("toy_mlp: hidden must be >= 1");
  if (samples_per_class == 0) {
    throw ConfigError("toy_mlp: samples_per_class must be >= 1");
  }
  return ProblemSpec(ToyMlpSpec{hidden, dataset_seed, samples_per_class});
}

ProblemSpec::Kind ProblemSpec::kind() const {
  return std::holds_alternative<QuadraticSpec>(spec_) ? Kind::quadratic
                                                      : Kind::toy_mlp;
}

std::size_t ProblemSpec::param_count() const {
  if (kind() == Kind::quadratic) return quadratic_spec().anchor.size();
  return layout_of(mlp_spec()).total;
}

std::size_t ProblemSpec::reg_count() const {
  return kind() == Kind::quadratic ? quadratic_spec().centers.size() : 3;
}

const QuadraticSpec& ProblemSpec::quadratic_spec() const {
  return std::get<QuadraticSpec>(spec_);
}

const ToyMlpSpec& ProblemSpec::mlp_spec() const {
  return std::get<ToyMlpSpec>(spec_);
}

std::string digest(const ProblemSpec& prob) {
  nlohmann::ordered_json j;
  if (prob.kind() == ProblemSpec::Kind::quadratic) {
    const auto& q = prob.quadratic_spec();
    j["kind"] = "quadratic";
    j["anchor"] = q.anchor;
    j["centers"] = q.centers;
  } else {
    const auto& m = prob.mlp_spec();
    j["kind"] = "toy_mlp";
    j["hidden"] = m.hidden;
    j["dataset_seed"] = m.dataset_seed;
    j["samples_per_class"] = m.samples_per_class;
  }
  return fnv1a_hex(j.dump());
}

ModelParams init_params(const ProblemSpec& prob, std::uint64_t seed) {
  const std::uint64_t stream = derive_stream(seed, 1);
  ModelParams params;
  params.theta.assign(prob.param_count(), 0.0);
  if (prob.kind() == ProblemSpec::Kind::quadratic) {
    for (std::size_t i = 0; i < params.theta.size(); ++i) {
      params.theta[i] = normal01(stream, i);
    }
    return params;
  }
  const MlpLayout lay = layout_of(prob.mlp_spec());
  const double s1 = 1.0 / std::sqrt(2.0);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(lay.h));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < 2 * lay.h; ++i) {
    params.theta[lay.w1 + i] = s1 * normal01(stream, idx++);
  }
  for (std::size_t i = 0; i < 2 * lay.h; ++i) {
    params.theta[lay.w2 + i] = s2 * normal01(stream, idx++);
  }
  return params;
}

ObjectiveVector evaluate(const ProblemSpec& prob, const ModelParams& params) {
  require_theta(prob, params);
  if (prob.kind() == ProblemSpec::Kind::quadratic) {
    const auto& q = prob.quadratic_spec();
    auto half_sq_dist = [&](const std::vector<double>& point) {
      double acc = 0.0;
      for (std::size_t i = 0; i < point.size(); ++i) {
        const double diff = params.theta[i] - point[i];
        acc += 0.5 * diff * diff;
      }
      return acc;
    };
    const double ell = half_sq_dist(q.anchor);
    require_term_finite(ell, "ell");
    std::vector<double> reg(q.centers.size());
    for (std::size_t i = 0; i < q.centers.size(); ++i) {
      reg[i] = half_sq_dist(q.centers[i]);
      require_term_finite(reg[i], "reg[" + std::to_string(i) + "]");
    }
    return ObjectiveVector(ell, std::move(reg));
  }

  const auto& spec = prob.mlp_spec();
  const Dataset ds = make_dataset(spec);
  const MlpTerms terms = mlp_forward(spec, params.theta, ds, 0.0, nullptr);
  require_term_finite(terms.ce, "ell");
  require_term_finite(terms.r_l2, "reg[0]");
  require_term_finite(terms.r_l1, "reg[1]");
  require_term_finite(terms.r_act, "reg[2]");
  return ObjectiveVector(terms.ce, {terms.r_l2, terms.r_l1, terms.r_act});
}

std::vector<double> grad_penalized(const ProblemSpec& prob,
                                   const ModelParams& params,
                                   std::span<const double> mu) {
  require_theta(prob, params);
  if (mu.size() != prob.reg_count()) {
    throw DimensionError("grad_penalized: mu length " +
                         std::to_string(mu.size()) + " != reg count " +
                         std::to_string(prob.reg_count()));
  }

  std::vector<double> grad(params.size(), 0.0);
  if (prob.kind() == ProblemSpec::Kind::quadratic) {
    const auto& q = prob.quadratic_spec();
    for (std::size_t i = 0; i < grad.size(); ++i) {
      grad[i] = params.theta[i] - q.anchor[i];
      for (std::size_t r = 0; r < q.centers.size(); ++r) {
        grad[i] += mu[r] * (params.theta[i] - q.centers[r][i]);
      }
    }
  } else {
    const auto& spec = prob.mlp_spec();
    const Dataset ds = make_dataset(spec);
    mlp_forward(spec, params.theta, ds, mu[2], &grad);
    const MlpLayout lay = layout_of(spec);
    auto weight_grads = [&](std::size_t begin, std::size_t count) {
      for (std::size_t i = begin; i < begin + count; ++i) {
        const double w = params.theta[i];
        grad[i] += mu[0] * w + mu[1] * w / std::sqrt(w * w + kL1Eps);
      }
    };
    weight_grads(lay.w1, 2 * lay.h);
    weight_grads(lay.w2, 2 * lay.h);
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw NumericError("grad_penalized: gradient is non-finite");
    }
  }
  return grad;
}

OptimizerState OptimizerState::make_sgd(double lr) {
  if (!(lr > 0.0)) throw ConfigError("lr: must be positive");
  OptimizerState opt;
  opt.kind = Kind::sgd;
  opt.lr = lr;
  return opt;
}

OptimizerState OptimizerState::make_adam(double lr) {
  if (!(lr > 0.0)) throw ConfigError("lr: must be positive");
  OptimizerState opt;
  opt.kind = Kind::adam;
  opt.lr = lr;
  return opt;
}

std::pair<OptimizerState, ModelParams> optimizer_step(
    const OptimizerState& opt, const ModelParams& params,
    std::span<const double> grad) {
  if (grad.size() != params.size()) {
    throw DimensionError("optimizer_step: gradient length mismatch");
  }
  OptimizerState next_opt = opt;
  ModelParams next = params;
  if (opt.kind == OptimizerState::Kind::sgd) {
    for (std::size_t i = 0; i < grad.size(); ++i) {
      next.theta[i] -= opt.lr * grad[i];
    }
    return {std::move(next_opt), std::move(next)};
  }
  if (next_opt.m.empty()) {
    next_opt.m.assign(params.size(), 0.0);
    next_opt.v.assign(params.size(), 0.0);
  }
  if (next_opt.m.size() != params.size()) {
    throw DimensionError("optimizer_step: adam accumulators sized for another problem");
  }
  next_opt.t += 1;
  const double c1 = 1.0 - std::pow(kAdamB1, static_cast<double>(next_opt.t));
  const double c2 = 1.0 - std::pow(kAdamB2, static_cast<double>(next_opt.t));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    next_opt.m[i] = kAdamB1 * next_opt.m[i] + (1.0 - kAdamB1) * grad[i];
    next_opt.v[i] = kAdamB2 * next_opt.v[i] + (1.0 - kAdamB2) * grad[i] * grad[i];
    const double mhat = next_opt.m[i] / c1;
    const double vhat = next_opt.v[i] / c2;
    next.theta[i] -= opt.lr * mhat / (std::sqrt(vhat) + kAdamEps);
  }
  return {std::move(next_opt), std::move(next)};
}

std::pair<OptimizerState, ModelParams> epoch(const ProblemSpec& prob,
                                             const OptimizerState& opt,
                                             const ModelParams& params,
                                             std::span<const double> mu,
                                             std::uint64_t inner_steps) {
  if (inner_steps == 0) throw ConfigError("inner_steps: must be >= 1");
  OptimizerState cur_opt = opt;
  ModelParams cur = params;
  for (std::uint64_t s = 0; s < inner_steps; ++s) {
    const std::vector<double> grad = grad_penalized(prob, cur, mu);
    auto [next_opt, next] = optimizer_step(cur_opt, cur, grad);
    cur_opt = std::move(next_opt);
    cur = std::move(next);
  }
  return {std::move(cur_opt), std::move(cur)};
}

}  // namespace mhof
