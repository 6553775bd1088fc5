#ifndef LRD_PRAGMATICS_HPP
#define LRD_PRAGMATICS_HPP

// Pragmatic listener L1: inverts the speaker to infer reward weights, either
// for a known speaker horizon or jointly with a prior over horizons.

#include <cstddef>
#include <span>
#include <vector>

#include "lrd/bandit.hpp"
#include "lrd/literal_listener.hpp"
#include "lrd/speaker.hpp"

namespace lrd {

struct HorizonPrior {
  std::vector<int> support;
  std::vector<double> mass;

  static HorizonPrior uniform(std::vector<int> support);
  static HorizonPrior point_mass(int horizon) { return uniform({horizon}); }
  // Throws ConfigError unless support is non-empty, positive, distinct and
  // mass is a distribution of the same length.
  void validate() const;
};

struct JointPosterior {
  Belief over_w;
  std::vector<double> over_h;  // aligned with HorizonPrior::support
  std::vector<double> joint;   // [hypothesis][horizon]
  std::size_t num_horizons = 0;

  double at(std::size_t hypothesis, std::size_t horizon_index) const {
    return joint[hypothesis * num_horizons + horizon_index];
  }
};

// L1(w | s, u, H) proportional to S1(u | w, s, H) P(w). `u` indexes the
// cache's utterance set. Throws InferenceError if no mass survives.
Belief l1_posterior_fixed(const ResponseCache& cache, StateId s, std::size_t u, int horizon,
                          const Belief& w_prior, double beta_s1);

// joint(w, H) proportional to S1(u | w, s, H) P(H) P(w), with both marginals.
JointPosterior l1_posterior_joint(const ResponseCache& cache, StateId s, std::size_t u,
                                  const Belief& w_prior, const HorizonPrior& h_prior,
                                  double beta_s1);

// Substitutes the posterior into the literal listener's action rule.
Policy l1_action_policy(const Environment& env, const Belief& posterior, const State& s,
                        const ListenerConfig& cfg);

// Unnormalized posterior moments for every utterance and a list of horizons,
// from one pass over the hypotheses in state s:
//   mass(h, u)   = sum_w S1(u | w, s, H_h) P(w)
//   weighted(h, u) = sum_w S1(u | w, s, H_h) P(w) w
// The L1 policy depends on the posterior only through its mean, so these
// are enough to act for every condition without materializing a Belief.
class PosteriorMoments {
 public:
  PosteriorMoments(const ResponseCache& cache, StateId s, const Belief& w_prior,
                   std::vector<int> horizons, double beta_s1);

  const std::vector<int>& horizons() const { return horizons_; }
  std::size_t num_utterances() const { return num_utterances_; }

  double mass(std::size_t h, std::size_t u) const { return mass_[h * num_utterances_ + u]; }
  std::span<const double> weighted(std::size_t h, std::size_t u) const {
    return {weighted_.data() + (h * num_utterances_ + u) * k_, k_};
  }

  // Posterior mean of w after hearing u from a speaker with horizons()[h].
  std::vector<double> fixed_mean(std::size_t h, std::size_t u) const;

  // Horizon-marginalized posterior mean. Every support value must appear in
  // horizons().
  std::vector<double> joint_mean(const HorizonPrior& prior, std::size_t u) const;

  // Posterior over the prior's support after hearing u.
  std::vector<double> horizon_posterior(const HorizonPrior& prior, std::size_t u) const;

  std::size_t index_of(int horizon) const;

 private:
  std::vector<int> horizons_;
  std::size_t num_utterances_ = 0;
  std::size_t k_ = 0;
  std::vector<double> mass_;      // [h][u]
  std::vector<double> weighted_;  // [h][u][k]
};

}  // namespace lrd

#endif  // LRD_PRAGMATICS_HPP
