#include "mhof/config.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace mhof {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) {
    throw ConfigError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

template <typename T>
T as(const json& j, const std::string& where, const char* key) {
  try {
    return need(j, where, key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T as_or(const json& j, const std::string& where, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return as<T>(j, where, key);
}

// Scalar-or-list numeric field; always returns the list of grid values.
std::vector<double> value_list(const json& j, const std::string& where,
                               const char* key,
                               std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array() && !v.empty()) {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        throw ConfigError(where + ": field '" + key + "' must be numeric");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }
  throw ConfigError(where + ": field '" + key +
                    "' must be a number or a non-empty list of numbers");
}

std::vector<std::uint64_t> int_list(const json& j, const std::string& where,
                                    const char* key,
                                    std::vector<std::uint64_t> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return {v.get<std::uint64_t>()};
  if (v.is_array() && !v.empty()) {
    std::vector<std::uint64_t> out;
    for (const auto& e : v) {
      if (!e.is_number_unsigned()) {
        throw ConfigError(where + ": field '" + key +
                          "' must hold non-negative integers");
      }
      out.push_back(e.get<std::uint64_t>());
    }
    return out;
  }
  throw ConfigError(where + ": field '" + key +
                    "' must be an integer or a non-empty list of integers");
}

// mu0 grid values: a scalar (replicated across components), a list of
// scalars (one grid point each), a list of d-vectors, or a per-component
// {"product": [[...], ...]} Cartesian product.
std::vector<std::vector<double>> mu0_list(const json& j,
                                          const std::string& where,
                                          std::size_t d) {
  if (!j.contains("mu0")) {
    return {std::vector<double>(d, 1.0)};
  }
  const json& v = j.at("mu0");
  if (v.is_number()) {
    return {std::vector<double>(d, v.get<double>())};
  }
  if (v.is_array() && !v.empty() && v.front().is_number()) {
    std::vector<std::vector<double>> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        throw ConfigError(where + ": mu0 list must be all numbers");
      }
      out.emplace_back(d, e.get<double>());
    }
    return out;
  }
  if (v.is_array() && !v.empty() && v.front().is_array()) {
    std::vector<std::vector<double>> out;
    for (const auto& e : v) {
      std::vector<double> vec;
      for (const auto& x : e) {
        if (!x.is_number()) {
          throw ConfigError(where + ": mu0 vectors must be all numbers");
        }
        vec.push_back(x.get<double>());
      }
      if (vec.size() != d) {
        throw ConfigError(where + ": mu0 vector length " +
                          std::to_string(vec.size()) +
                          " does not match problem reg count " +
                          std::to_string(d));
      }
      out.push_back(std::move(vec));
    }
    return out;
  }
  if (v.is_object()) {
    reject_unknown(v, where + ".mu0", {"product"});
    const json& axes = need(v, where + ".mu0", "product");
    if (!axes.is_array() || axes.size() != d) {
      throw ConfigError(where + ": mu0.product needs exactly " +
                        std::to_string(d) + " component value lists");
    }
    std::vector<std::vector<double>> out{{}};
    for (const auto& axis : axes) {
      if (!axis.is_array() || axis.empty()) {
        throw ConfigError(where +
                          ": mu0.product components must be non-empty lists");
      }
      std::vector<std::vector<double>> next;
      for (const auto& prefix : out) {
        for (const auto& x : axis) {
          if (!x.is_number()) {
            throw ConfigError(where + ": mu0.product values must be numbers");
          }
          auto vec = prefix;
          vec.push_back(x.get<double>());
          next.push_back(std::move(vec));
        }
      }
      out = std::move(next);
    }
    return out;
  }
  throw ConfigError(where + ": mu0 must be a number, a list, a vector list, "
                            "or {\"product\": [...]}");
}

ProblemSpec parse_problem(const json& j) {
  if (!j.is_object()) throw ConfigError("problem: must be an object");
  const std::string kind = as<std::string>(j, "problem", "kind");
  if (kind == "quadratic") {
    reject_unknown(j, "problem", {"kind", "anchor", "centers"});
    auto anchor = as<std::vector<double>>(j, "problem", "anchor");
    auto centers = as<std::vector<std::vector<double>>>(j, "problem", "centers");
    return ProblemSpec::quadratic(std::move(anchor), std::move(centers));
  }
  if (kind == "toy_mlp") {
    reject_unknown(j, "problem",
                   {"kind", "hidden", "dataset_seed", "samples_per_class"});
    return ProblemSpec::toy_mlp(
        as_or<std::uint64_t>(j, "problem", "hidden", 8),
        as_or<std::uint64_t>(j, "problem", "dataset_seed", 0),
        as_or<std::uint64_t>(j, "problem", "samples_per_class", 200));
  }
  throw ConfigError("problem: unknown kind '" + kind + "'");
}

std::pair<OptimizerState, std::uint64_t> parse_optimizer(const json& j) {
  if (!j.is_object()) throw ConfigError("optimizer: must be an object");
  reject_unknown(j, "optimizer", {"kind", "lr", "inner_steps"});
  const std::string kind = as<std::string>(j, "optimizer", "kind");
  const double lr = as<double>(j, "optimizer", "lr");
  const std::uint64_t inner = as_or<std::uint64_t>(j, "optimizer", "inner_steps", 5);
  if (inner == 0) throw ConfigError("optimizer: inner_steps must be >= 1");
  if (kind == "sgd") return {OptimizerState::make_sgd(lr), inner};
  if (kind == "adam") return {OptimizerState::make_adam(lr), inner};
  throw ConfigError("optimizer: unknown kind '" + kind + "'");
}

std::vector<SchemeConfig> expand_scheme(const json& j, std::size_t entry,
                                        std::size_t d,
                                        std::uint64_t inner_steps) {
  const std::string where = "schemes[" + std::to_string(entry) + "]";
  if (!j.is_object()) throw ConfigError(where + ": must be an object");
  reject_unknown(j, where,
                 {"scheme", "mu0", "rho", "eta", "v_sat", "mu_clip", "xi_d",
                  "smoothing", "xi_o", "xi_r", "warmup_epochs", "budget"});
  const SchemeKind kind = scheme_from_string(as<std::string>(j, where, "scheme"));

  const ControllerConfig defaults;
  const auto mu0s = mu0_list(j, where, d);
  const auto rhos = value_list(j, where, "rho", {defaults.rho});
  const auto etas = value_list(j, where, "eta", {defaults.eta});
  const auto vsats = value_list(j, where, "v_sat", {defaults.v_sat});
  const auto clips = value_list(j, where, "mu_clip", {defaults.mu_clip});
  const auto xids = value_list(j, where, "xi_d", {defaults.xi_d});
  const auto xios = value_list(j, where, "xi_o", {defaults.xi_o});
  const auto xirs = value_list(j, where, "xi_r", {defaults.xi_r});
  const bool smoothing = as_or<bool>(j, where, "smoothing", false);
  const auto warmups = int_list(j, where, "warmup_epochs", {50});
  const auto budgets = int_list(j, where, "budget", {100});

  std::vector<SchemeConfig> out;
  for (const auto& mu0 : mu0s)
    for (double rho : rhos)
      for (double eta : etas)
        for (double v_sat : vsats)
          for (double mu_clip : clips)
            for (double xi_d : xids)
              for (double xi_o : xios)
                for (double xi_r : xirs)
                  for (std::uint64_t warmup : warmups)
                    for (std::uint64_t budget : budgets) {
                      SchemeConfig cfg;
                      cfg.scheme = kind;
                      cfg.mu0 = mu0;
                      cfg.warmup_epochs = warmup;
                      cfg.budget = budget;
                      cfg.inner_steps = inner_steps;
                      cfg.controller.rho = rho;
                      cfg.controller.eta = eta;
                      cfg.controller.v_sat = v_sat;
                      cfg.controller.mu_clip = mu_clip;
                      cfg.controller.xi_d = xi_d;
                      cfg.controller.smoothing_enabled = smoothing;
                      cfg.controller.xi_o = xi_o;
                      cfg.controller.xi_r = xi_r;
                      cfg.validate();
                      out.push_back(std::move(cfg));
                    }
  return out;
}

}  // namespace

std::size_t ExperimentConfig::total_runs() const {
  std::size_t cells = 0;
  for (const auto& [name, configs] : grids) cells += configs.size();
  return cells * seeds.size();
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("config is not valid JSON", 1);
  if (!j.is_object()) throw ConfigError("config: must be a JSON object");
  reject_unknown(j, "config",
                 {"problem", "optimizer", "schemes", "seeds", "output_dir"});

  ExperimentConfig cfg(parse_problem(need(j, "config", "problem")));
  auto [opt, inner_steps] = parse_optimizer(need(j, "config", "optimizer"));
  cfg.optimizer = std::move(opt);

  const json& schemes = need(j, "config", "schemes");
  if (!schemes.is_array() || schemes.empty()) {
    throw ConfigError("schemes: must be a non-empty list");
  }
  const std::size_t d = cfg.problem.reg_count();
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    auto expanded = expand_scheme(schemes[i], i, d, inner_steps);
    auto& bucket = cfg.grids[to_string(expanded.front().scheme)];
    for (auto& sc : expanded) bucket.push_back(std::move(sc));
  }

  cfg.seeds = as<std::vector<std::uint64_t>>(j, "config", "seeds");
  if (cfg.seeds.empty()) throw ConfigError("seeds: must be non-empty");
  cfg.output_dir = as_or<std::string>(j, "config", "output_dir", "");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace mhof
