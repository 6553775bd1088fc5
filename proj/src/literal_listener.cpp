#include "lrd/literal_listener.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "lrd/error.hpp"
#include "lrd/softmax.hpp"

namespace lrd {

Belief Belief::uniform(const Environment& env) {
  const std::size_t n = env.hypotheses().size();
  return Belief{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

Belief Belief::point_mass(const Environment& env, std::size_t hypothesis) {
  Belief b{std::vector<double>(env.hypotheses().size(), 0.0)};
  b.mass.at(hypothesis) = 1.0;
  return b;
}

double Policy::prob_of(ActionId a) const {
  for (std::size_t i = 0; i < state.action_ids.size(); ++i) {
    if (state.action_ids[i] == a) return probs[i];
  }
  return 0.0;
}

Policy l0_instruction_policy(const Instruction& u, const State& s) {
  if (s.size() == 0) throw ConfigError("l0_instruction_policy: empty state");
  Policy p{s, std::vector<double>(s.size(), 0.0)};
  if (s.contains(u.action)) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.action_ids[i] == u.action) p.probs[i] = 1.0;
    }
  } else {
    std::fill(p.probs.begin(), p.probs.end(), 1.0 / static_cast<double>(s.size()));
  }
  return p;
}

Belief l0_belief_update(const Environment& env, const Belief& prior, const Description& u) {
  const auto& hyps = env.hypotheses();
  if (prior.size() != hyps.size()) {
    throw ConfigError(fmt::format("belief has {} entries for {} hypotheses", prior.size(),
                                  hyps.size()));
  }
  Belief post{std::vector<double>(prior.size(), 0.0)};
  double total = 0.0;
  for (std::size_t h = 0; h < hyps.size(); ++h) {
    if (description_consistent(u, hyps[h])) {
      post.mass[h] = prior.mass[h];
      total += prior.mass[h];
    }
  }
  if (total <= 0.0) {
    throw InferenceError(fmt::format("no prior mass is consistent with feature {} = {}",
                                     u.feature, u.value));
  }
  for (double& m : post.mass) m /= total;
  return post;
}

std::vector<double> mean_weights(const Environment& env, const Belief& belief) {
  const std::size_t k = env.num_features();
  std::vector<double> mean(k, 0.0);
  for (std::size_t h = 0; h < belief.size(); ++h) {
    const double m = belief.mass[h];
    if (m == 0.0) continue;
    const auto row = env.hypothesis_row(h);
    for (std::size_t i = 0; i < k; ++i) mean[i] += m * row[i];
  }
  return mean;
}

Policy policy_from_mean_weights(const Environment& env, std::span<const double> mean,
                                const State& s, double beta) {
  Policy p{s, std::vector<double>(s.size())};
  for (std::size_t i = 0; i < s.size(); ++i) {
    p.probs[i] = beta * reward(env.action(s.action_ids[i]).features, mean);
  }
  softmax_in_place(p.probs);
  return p;
}

Policy l0_action_policy(const Environment& env, const Belief& belief, const State& s,
                        const ListenerConfig& cfg) {
  const auto mean = mean_weights(env, belief);
  return policy_from_mean_weights(env, mean, s, cfg.beta_l0);
}

Policy l0_respond(const Environment& env, const Utterance& u, const State& s,
                  const Belief& prior, const ListenerConfig& cfg) {
  if (const auto* instr = std::get_if<Instruction>(&u)) return l0_instruction_policy(*instr, s);
  return l0_action_policy(env, l0_belief_update(env, prior, std::get<Description>(u)), s, cfg);
}

double expected_reward(const Environment& env, const Policy& policy,
                       std::span<const double> w) {
  double total = 0.0;
  for (std::size_t i = 0; i < policy.state.size(); ++i) {
    total += policy.probs[i] * reward(env.action(policy.state.action_ids[i]).features, w);
  }
  return total;
}

}  // namespace lrd
