#ifndef LRD_LITERAL_LISTENER_HPP
#define LRD_LITERAL_LISTENER_HPP

// Literal listener L0. Instructions act as a partial policy; descriptions
// filter a belief over weight hypotheses, and the listener then soft-maximizes
// expected reward under that belief.

#include <span>
#include <vector>

#include "lrd/bandit.hpp"
#include "lrd/language.hpp"

namespace lrd {

// Probability mass aligned with Environment::hypotheses().
struct Belief {
  std::vector<double> mass;

  static Belief uniform(const Environment& env);
  static Belief point_mass(const Environment& env, std::size_t hypothesis);
  std::size_t size() const { return mass.size(); }
};

// probs[i] is the probability of state.action_ids[i].
struct Policy {
  State state;
  std::vector<double> probs;

  double prob_of(ActionId a) const;
};

struct ListenerConfig {
  double beta_l0 = 3.0;
};

Policy l0_instruction_policy(const Instruction& u, const State& s);

// Keeps prior mass on hypotheses consistent with u and renormalizes.
// Throws InferenceError if no consistent hypothesis has prior mass.
Belief l0_belief_update(const Environment& env, const Belief& prior, const Description& u);

// Belief-mean weight vector. Expected reward of any action is linear in w, so
// E_b[R(a, w)] = mean_weights(b) . phi(a).
std::vector<double> mean_weights(const Environment& env, const Belief& belief);

// Softmax over beta * (mean . phi(a)) for the actions of s.
Policy policy_from_mean_weights(const Environment& env, std::span<const double> mean,
                                const State& s, double beta);

Policy l0_action_policy(const Environment& env, const Belief& belief, const State& s,
                        const ListenerConfig& cfg);

Policy l0_respond(const Environment& env, const Utterance& u, const State& s,
                  const Belief& prior, const ListenerConfig& cfg);

// Expected reward of acting with `policy` when the true weights are w.
double expected_reward(const Environment& env, const Policy& policy,
                       std::span<const double> w);

}  // namespace lrd

#endif  // LRD_LITERAL_LISTENER_HPP
