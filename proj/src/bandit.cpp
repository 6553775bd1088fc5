#include "lrd/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "lrd/error.hpp"

namespace lrd {

namespace {

// Names for the default 3 colors x 3 patterns layout.
const std::vector<std::string> kMushroomFeatures{"green",   "blue",    "red",
                                                 "spotted", "striped", "solid"};

std::vector<Action> actions_from_groups(const std::vector<std::size_t>& groups) {
  if (groups.empty()) throw ConfigError("feature_groups must not be empty");
  std::size_t num_features = 0;
  std::size_t num_actions = 1;
  for (std::size_t g : groups) {
    if (g == 0) throw ConfigError("feature group sizes must be positive");
    num_features += g;
    num_actions *= g;
  }
  std::vector<Action> actions;
  actions.reserve(num_actions);
  // Mixed-radix counter over groups, first group most significant.
  std::vector<std::size_t> digit(groups.size(), 0);
  for (std::size_t id = 0; id < num_actions; ++id) {
    Action a;
    a.id = id;
    a.features.bits.assign(num_features, 0);
    std::size_t offset = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      a.features.bits[offset + digit[g]] = 1;
      offset += groups[g];
    }
    actions.push_back(std::move(a));
    for (std::size_t g = groups.size(); g-- > 0;) {
      if (++digit[g] < groups[g]) break;
      digit[g] = 0;
    }
  }
  return actions;
}

std::vector<Action> actions_from_bits(const std::vector<std::vector<int>>& rows) {
  const std::size_t k = rows.front().size();
  if (k == 0) throw ConfigError("explicit actions need at least one feature");
  std::vector<Action> actions;
  for (std::size_t id = 0; id < rows.size(); ++id) {
    if (rows[id].size() != k) {
      throw ConfigError(fmt::format("action {} has {} features, expected {}", id,
                                    rows[id].size(), k));
    }
    Action a;
    a.id = id;
    for (int bit : rows[id]) {
      if (bit != 0 && bit != 1) {
        throw ConfigError(fmt::format("action {} feature is {}, must be 0 or 1", id, bit));
      }
      a.features.bits.push_back(static_cast<std::uint8_t>(bit));
    }
    actions.push_back(std::move(a));
  }
  return actions;
}

}  // namespace

bool State::contains(ActionId a) const {
  return std::binary_search(action_ids.begin(), action_ids.end(), a);
}

double reward(const Action& action, const RewardWeights& weights) {
  if (action.features.size() != weights.size()) {
    throw ConfigError(fmt::format("reward: {} features but {} weights",
                                  action.features.size(), weights.size()));
  }
  int total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] * action.features[i];
  return total;
}

double reward(const FeatureVector& features, std::span<const double> weights) {
  if (features.size() != weights.size()) {
    throw ConfigError(fmt::format("reward: {} features but {} weights", features.size(),
                                  weights.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (features[i]) total += weights[i];
  }
  return total;
}

std::vector<RewardWeights> enumerate_weight_hypotheses(std::size_t num_features,
                                                       std::span<const int> value_set,
                                                       std::uint64_t cap) {
  if (num_features == 0) throw ConfigError("need at least one feature");
  if (value_set.empty()) throw ConfigError("weight value set is empty");
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < num_features; ++i) {
    if (count > cap / value_set.size()) {
      throw TooLargeError(fmt::format("{}^{} hypotheses exceeds the cap of {}",
                                      value_set.size(), num_features, cap));
    }
    count *= value_set.size();
  }
  std::vector<RewardWeights> out;
  out.reserve(count);
  std::vector<std::size_t> digit(num_features, 0);
  for (std::uint64_t n = 0; n < count; ++n) {
    RewardWeights w;
    w.w.resize(num_features);
    for (std::size_t i = 0; i < num_features; ++i) w.w[i] = value_set[digit[i]];
    out.push_back(std::move(w));
    for (std::size_t i = num_features; i-- > 0;) {
      if (++digit[i] < value_set.size()) break;
      digit[i] = 0;
    }
  }
  return out;
}

std::vector<State> enumerate_states(std::size_t num_actions, std::size_t state_size) {
  if (state_size == 0) throw ConfigError("state_size must be positive");
  if (state_size > num_actions) {
    throw ConfigError(fmt::format("state_size {} exceeds the {} available actions",
                                  state_size, num_actions));
  }
  std::vector<State> states;
  std::vector<ActionId> pick(state_size);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    states.push_back(State{pick});
    // Rightmost position that can still advance.
    std::size_t i = state_size;
    while (i > 0 && pick[i - 1] == num_actions - state_size + (i - 1)) --i;
    if (i == 0) return states;
    ++pick[i - 1];
    for (std::size_t j = i; j < state_size; ++j) pick[j] = pick[j - 1] + 1;
  }
}

Environment::Environment(const EnvironmentConfig& config) : config_(config) {
  actions_ = config.explicit_actions.empty() ? actions_from_groups(config.feature_groups)
                                             : actions_from_bits(config.explicit_actions);
  num_features_ = actions_.front().features.size();

  if (config.weight_values.empty()) throw ConfigError("weight_values must not be empty");
  value_set_ = config.weight_values;
  std::sort(value_set_.begin(), value_set_.end());
  if (std::adjacent_find(value_set_.begin(), value_set_.end()) != value_set_.end()) {
    throw ConfigError("weight_values contains duplicates");
  }

  states_ = enumerate_states(actions_.size(), config.state_size);

  if (config.state_prior.empty()) {
    state_prior_.assign(states_.size(), 1.0 / static_cast<double>(states_.size()));
  } else {
    if (config.state_prior.size() != states_.size()) {
      throw ConfigError(fmt::format("state_prior has {} entries for {} states",
                                    config.state_prior.size(), states_.size()));
    }
    double total = 0.0;
    for (double p : config.state_prior) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("state_prior entries must be >= 0");
      total += p;
    }
    if (total <= 0.0) throw ConfigError("state_prior has no mass");
    state_prior_ = config.state_prior;
    for (double& p : state_prior_) p /= total;
  }

  hypotheses_ = enumerate_weight_hypotheses(num_features_, value_set_, config.hypothesis_cap);
  hypothesis_values_.reserve(hypotheses_.size() * num_features_);
  for (const RewardWeights& h : hypotheses_) {
    for (int v : h.w) hypothesis_values_.push_back(v);
  }

  if (!config.feature_names.empty()) {
    if (config.feature_names.size() != num_features_) {
      throw ConfigError(fmt::format("{} feature names for {} features",
                                    config.feature_names.size(), num_features_));
    }
    feature_names_ = config.feature_names;
  } else if (config.explicit_actions.empty() && config.feature_groups == std::vector<std::size_t>{3, 3}) {
    feature_names_ = kMushroomFeatures;
  } else {
    for (std::size_t i = 0; i < num_features_; ++i) feature_names_.push_back(fmt::format("f{}", i));
  }
}

void Environment::check_weights(const RewardWeights& w) const {
  if (w.size() != num_features_) {
    throw ConfigError(fmt::format("weights have {} entries, environment has {} features",
                                  w.size(), num_features_));
  }
  for (int v : w.w) {
    if (!std::binary_search(value_set_.begin(), value_set_.end(), v)) {
      throw ConfigError(fmt::format("weight value {} is outside the value set", v));
    }
  }
}

std::string Environment::action_name(ActionId id) const {
  std::string name;
  const FeatureVector& f = action(id).features;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f[i]) continue;
    if (!name.empty()) name += '-';
    name += feature_names_[i];
  }
  return name.empty() ? fmt::format("a{}", id) : name;
}

EnvironmentConfig EnvironmentConfig::from_json(const nlohmann::json& j) {
  EnvironmentConfig c;
  try {
    if (j.contains("feature_groups")) c.feature_groups = j.at("feature_groups").get<std::vector<std::size_t>>();
    if (j.contains("actions")) c.explicit_actions = j.at("actions").get<std::vector<std::vector<int>>>();
    if (j.contains("feature_names")) c.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (j.contains("state_size")) c.state_size = j.at("state_size").get<std::size_t>();
    if (j.contains("weight_values")) c.weight_values = j.at("weight_values").get<std::vector<int>>();
    if (j.contains("hypothesis_cap")) c.hypothesis_cap = j.at("hypothesis_cap").get<std::uint64_t>();
    if (j.contains("state_prior")) {
      const auto& p = j.at("state_prior");
      if (p.is_string()) {
        if (p.get<std::string>() != "uniform") {
          throw ConfigError("state_prior must be \"uniform\" or an array of weights");
        }
      } else {
        c.state_prior = p.get<std::vector<double>>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("environment config: {}", e.what()));
  }
  return c;
}

nlohmann::json EnvironmentConfig::to_json() const {
  nlohmann::json j;
  j["feature_groups"] = feature_groups;
  if (!explicit_actions.empty()) j["actions"] = explicit_actions;
  if (!feature_names.empty()) j["feature_names"] = feature_names;
  j["state_size"] = state_size;
  j["weight_values"] = weight_values;
  if (state_prior.empty()) {
    j["state_prior"] = "uniform";
  } else {
    j["state_prior"] = state_prior;
  }
  j["hypothesis_cap"] = hypothesis_cap;
  return j;
}

}  // namespace lrd
