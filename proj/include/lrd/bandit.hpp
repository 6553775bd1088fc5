#ifndef LRD_BANDIT_HPP
#define LRD_BANDIT_HPP

// Linear bandit primitives: actions with binary features, states (subsets of
// actions), integer reward-weight hypotheses, and the enumerated environment.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace lrd {

using ActionId = std::size_t;
using StateId = std::size_t;

struct FeatureVector {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct Action {
  ActionId id = 0;
  FeatureVector features;
};

// Action ids are kept sorted ascending.
struct State {
  std::vector<ActionId> action_ids;

  std::size_t size() const { return action_ids.size(); }
  bool contains(ActionId a) const;
  friend bool operator==(const State&, const State&) = default;
};

struct RewardWeights {
  std::vector<int> w;

  std::size_t size() const { return w.size(); }
  int operator[](std::size_t i) const { return w[i]; }
  friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

// R(a, w) = w . phi(a). Throws ConfigError on a length mismatch.
double reward(const Action& action, const RewardWeights& weights);
double reward(const FeatureVector& features, std::span<const double> weights);

struct EnvironmentConfig {
  // Sizes of the mutually exclusive feature groups. Every action activates
  // exactly one feature per group, so actions = product of group sizes.
  std::vector<std::size_t> feature_groups{3, 3};
  // Overrides feature_groups when non-empty: one bit vector per action.
  std::vector<std::vector<int>> explicit_actions;
  std::vector<std::string> feature_names;
  std::size_t state_size = 3;
  std::vector<int> weight_values{-2, -1, 0, 1, 2};
  // Empty means uniform; otherwise one non-negative weight per state
  // (normalized on build).
  std::vector<double> state_prior;
  std::uint64_t hypothesis_cap = 10'000'000;

  static EnvironmentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

class Environment {
 public:
  // Throws ConfigError (or TooLargeError) on an invalid configuration.
  explicit Environment(const EnvironmentConfig& config);

  std::size_t num_features() const { return num_features_; }
  const std::vector<Action>& actions() const { return actions_; }
  const std::vector<State>& states() const { return states_; }
  const std::vector<RewardWeights>& hypotheses() const { return hypotheses_; }
  const std::vector<double>& state_prior() const { return state_prior_; }
  const std::vector<int>& value_set() const { return value_set_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const EnvironmentConfig& config() const { return config_; }

  const Action& action(ActionId id) const { return actions_.at(id); }
  const State& state(StateId id) const { return states_.at(id); }

  // Row h of the hypothesis grid as doubles (length K).
  std::span<const double> hypothesis_row(std::size_t h) const {
    return {hypothesis_values_.data() + h * num_features_, num_features_};
  }

  // Validates length and membership in the value set.
  void check_weights(const RewardWeights& w) const;

  std::string action_name(ActionId id) const;

 private:
  EnvironmentConfig config_;
  std::size_t num_features_ = 0;
  std::vector<Action> actions_;
  std::vector<State> states_;
  std::vector<RewardWeights> hypotheses_;
  std::vector<double> hypothesis_values_;
  std::vector<double> state_prior_;
  std::vector<int> value_set_;
  std::vector<std::string> feature_names_;
};

inline Environment build_environment(const EnvironmentConfig& config) {
  return Environment(config);
}

// All |value_set|^K weight vectors in lexicographic order (feature 0 most
// significant, values in the order given). Throws TooLargeError above cap and
// ConfigError for K == 0 or an empty value set.
std::vector<RewardWeights> enumerate_weight_hypotheses(
    std::size_t num_features, std::span<const int> value_set,
    std::uint64_t cap = 10'000'000);

// All size-m subsets of {0..n-1} in lexicographic order.
std::vector<State> enumerate_states(std::size_t num_actions, std::size_t state_size);

}  // namespace lrd

#endif  // LRD_BANDIT_HPP
