#ifndef LRD_SPEAKER_HPP
#define LRD_SPEAKER_HPP

// Speaker S1: picks utterances by softmax over the reward an imagined literal
// listener collects, in the visible state plus (H - 1) future i.i.d. states.
//
// Rewards are linear in w, so the listener's response to (u, s) only enters
// through its expected feature vector psi(u, s) = sum_a pi_L0(a | u, s) phi(a).
// ResponseCache precomputes psi once per listener configuration; every
// utility afterwards is a K-dimensional dot product.

#include <cstddef>
#include <span>
#include <vector>

#include "lrd/bandit.hpp"
#include "lrd/language.hpp"
#include "lrd/literal_listener.hpp"

namespace lrd {

struct SpeakerConfig {
  double beta_s1 = 10.0;
  int horizon = 1;
};

class ResponseCache {
 public:
  // `prior` is the literal listener's belief before hearing anything.
  ResponseCache(const Environment& env, UtteranceSet utterances, const ListenerConfig& listener,
                const Belief& prior);

  const Environment& environment() const { return *env_; }
  const UtteranceSet& utterances() const { return utterances_; }
  const ListenerConfig& listener() const { return listener_; }
  std::size_t num_utterances() const { return utterances_.size(); }
  std::size_t num_states() const { return num_states_; }

  const Policy& policy(std::size_t u, StateId s) const { return policies_[u * num_states_ + s]; }

  std::span<const double> psi(std::size_t u, StateId s) const {
    return {psi_.data() + (u * num_states_ + s) * k_, k_};
  }
  std::span<const double> psi_future(std::size_t u) const {
    return {psi_future_.data() + u * k_, k_};
  }

 private:
  const Environment* env_;
  UtteranceSet utterances_;
  ListenerConfig listener_;
  std::size_t num_states_ = 0;
  std::size_t k_ = 0;
  std::vector<Policy> policies_;
  std::vector<double> psi_;         // [u][s][k]
  std::vector<double> psi_future_;  // [u][k]
};

// sum_a pi_L0(a | u, s) R(a, w)
double present_utility(const ResponseCache& cache, std::size_t u, StateId s,
                       std::span<const double> w);

// sum_s P(s) present_utility(u, s, w)
double future_utility(const ResponseCache& cache, std::size_t u, std::span<const double> w);

// present + (H - 1) * future
double speaker_utility(const ResponseCache& cache, std::size_t u, StateId s,
                       std::span<const double> w, int horizon);

// Utilities for every utterance in the cache, written into `out`.
void speaker_utilities(const ResponseCache& cache, StateId s, std::span<const double> w,
                       int horizon, std::span<double> out);

// S1(u | w, s, H) for every utterance.
std::vector<double> speaker_distribution(const ResponseCache& cache, StateId s,
                                         std::span<const double> w, const SpeakerConfig& cfg);

std::vector<double> to_doubles(const RewardWeights& w);

// Index of the most probable entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> probs);

}  // namespace lrd

#endif  // LRD_SPEAKER_HPP
