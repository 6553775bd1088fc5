#include "lrd/speaker.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "lrd/error.hpp"
#include "lrd/softmax.hpp"

namespace lrd {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

}  // namespace

ResponseCache::ResponseCache(const Environment& env, UtteranceSet utterances,
                             const ListenerConfig& listener, const Belief& prior)
    : env_(&env),
      utterances_(std::move(utterances)),
      listener_(listener),
      num_states_(env.states().size()),
      k_(env.num_features()) {
  if (utterances_.size() == 0) throw ConfigError("utterance set is empty");
  if (listener.beta_l0 < 0.0) throw ConfigError("beta_l0 must be non-negative");
  for (const Utterance& u : utterances_.utterances) check_utterance(env, u);

  policies_.reserve(utterances_.size() * num_states_);
  psi_.assign(utterances_.size() * num_states_ * k_, 0.0);
  psi_future_.assign(utterances_.size() * k_, 0.0);

  const auto& prior_probs = env.state_prior();
  for (std::size_t u = 0; u < utterances_.size(); ++u) {
    // Descriptions update the belief once; the policy in each state then only
    // needs the belief mean.
    std::vector<double> mean;
    if (const auto* d = std::get_if<Description>(&utterances_[u])) {
      mean = mean_weights(env, l0_belief_update(env, prior, *d));
    }
    for (StateId s = 0; s < num_states_; ++s) {
      const State& state = env.state(s);
      Policy p = mean.empty()
                     ? l0_instruction_policy(std::get<Instruction>(utterances_[u]), state)
                     : policy_from_mean_weights(env, mean, state, listener.beta_l0);
      double* row = psi_.data() + (u * num_states_ + s) * k_;
      for (std::size_t i = 0; i < state.size(); ++i) {
        const FeatureVector& f = env.action(state.action_ids[i]).features;
        for (std::size_t j = 0; j < k_; ++j) {
          if (f[j]) row[j] += p.probs[i];
        }
      }
      for (std::size_t j = 0; j < k_; ++j) psi_future_[u * k_ + j] += prior_probs[s] * row[j];
      policies_.push_back(std::move(p));
    }
  }
}

double present_utility(const ResponseCache& cache, std::size_t u, StateId s,
                       std::span<const double> w) {
  return dot(w, cache.psi(u, s));
}

double future_utility(const ResponseCache& cache, std::size_t u, std::span<const double> w) {
  return dot(w, cache.psi_future(u));
}

double speaker_utility(const ResponseCache& cache, std::size_t u, StateId s,
                       std::span<const double> w, int horizon) {
  const double present = present_utility(cache, u, s, w);
  if (horizon == 1) return present;
  return present + static_cast<double>(horizon - 1) * future_utility(cache, u, w);
}

void speaker_utilities(const ResponseCache& cache, StateId s, std::span<const double> w,
                       int horizon, std::span<double> out) {
  for (std::size_t u = 0; u < cache.num_utterances(); ++u) {
    out[u] = speaker_utility(cache, u, s, w, horizon);
  }
}

std::vector<double> speaker_distribution(const ResponseCache& cache, StateId s,
                                         std::span<const double> w, const SpeakerConfig& cfg) {
  if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (cfg.beta_s1 < 0.0) throw ConfigError("beta_s1 must be non-negative");
  std::vector<double> logits(cache.num_utterances());
  speaker_utilities(cache, s, w, cfg.horizon, logits);
  for (double& x : logits) x *= cfg.beta_s1;
  softmax_in_place(logits);
  return logits;
}

std::vector<double> to_doubles(const RewardWeights& w) { return {w.w.begin(), w.w.end()}; }

std::size_t argmax(std::span<const double> probs) {
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

}  // namespace lrd
