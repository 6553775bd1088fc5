#include "lrd/pragmatics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "lrd/error.hpp"
#include "lrd/softmax.hpp"

namespace lrd {

namespace {

void check_prior(const ResponseCache& cache, const Belief& w_prior) {
  if (w_prior.size() != cache.environment().hypotheses().size()) {
    throw ConfigError(fmt::format("w prior has {} entries for {} hypotheses", w_prior.size(),
                                  cache.environment().hypotheses().size()));
  }
}

// Per-hypothesis speaker evaluation in state s. Utilities split as
// present + (H - 1) * future, so the two dot products are computed once and
// reused across horizons.
class SpeakerEvaluator {
 public:
  SpeakerEvaluator(const ResponseCache& cache, StateId s, double beta_s1)
      : cache_(cache),
        state_(s),
        beta_(beta_s1),
        present_(cache.num_utterances()),
        future_(cache.num_utterances()),
        probs_(cache.num_utterances()) {
    if (beta_s1 < 0.0) throw ConfigError("beta_s1 must be non-negative");
  }

  void load(std::span<const double> w) {
    for (std::size_t u = 0; u < present_.size(); ++u) {
      present_[u] = present_utility(cache_, u, state_, w);
      future_[u] = future_utility(cache_, u, w);
    }
  }

  // S1(. | w, s, H) for the loaded w.
  std::span<const double> distribution(int horizon) {
    const double scale = static_cast<double>(horizon - 1);
    for (std::size_t u = 0; u < probs_.size(); ++u) {
      probs_[u] = beta_ * (horizon == 1 ? present_[u] : present_[u] + scale * future_[u]);
    }
    softmax_in_place(probs_);
    return probs_;
  }

 private:
  const ResponseCache& cache_;
  StateId state_;
  double beta_;
  std::vector<double> present_;
  std::vector<double> future_;
  std::vector<double> probs_;
};

}  // namespace

HorizonPrior HorizonPrior::uniform(std::vector<int> support) {
  HorizonPrior p;
  p.mass.assign(support.size(), support.empty() ? 0.0 : 1.0 / static_cast<double>(support.size()));
  p.support = std::move(support);
  return p;
}

void HorizonPrior::validate() const {
  if (support.empty()) throw ConfigError("horizon prior support is empty");
  if (mass.size() != support.size()) throw ConfigError("horizon prior mass/support mismatch");
  std::vector<int> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1) throw ConfigError("horizons must be >= 1");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("horizon prior support has duplicates");
  }
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0)) throw ConfigError("horizon prior mass must be non-negative");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("horizon prior mass must sum to 1");
}

Belief l1_posterior_fixed(const ResponseCache& cache, StateId s, std::size_t u, int horizon,
                          const Belief& w_prior, double beta_s1) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  check_prior(cache, w_prior);
  const Environment& env = cache.environment();
  SpeakerEvaluator speaker(cache, s, beta_s1);
  Belief post{std::vector<double>(w_prior.size(), 0.0)};
  double total = 0.0;
  for (std::size_t h = 0; h < w_prior.size(); ++h) {
    if (w_prior.mass[h] == 0.0) continue;
    speaker.load(env.hypothesis_row(h));
    post.mass[h] = speaker.distribution(horizon)[u] * w_prior.mass[h];
    total += post.mass[h];
  }
  if (!(total > 0.0)) throw InferenceError("pragmatic posterior has no mass");
  for (double& m : post.mass) m /= total;
  return post;
}

JointPosterior l1_posterior_joint(const ResponseCache& cache, StateId s, std::size_t u,
                                  const Belief& w_prior, const HorizonPrior& h_prior,
                                  double beta_s1) {
  h_prior.validate();
  check_prior(cache, w_prior);
  const Environment& env = cache.environment();
  const std::size_t nh = h_prior.support.size();
  SpeakerEvaluator speaker(cache, s, beta_s1);

  JointPosterior out;
  out.num_horizons = nh;
  out.joint.assign(w_prior.size() * nh, 0.0);
  double total = 0.0;
  for (std::size_t h = 0; h < w_prior.size(); ++h) {
    if (w_prior.mass[h] == 0.0) continue;
    speaker.load(env.hypothesis_row(h));
    for (std::size_t j = 0; j < nh; ++j) {
      const double v = speaker.distribution(h_prior.support[j])[u] * h_prior.mass[j] * w_prior.mass[h];
      out.joint[h * nh + j] = v;
      total += v;
    }
  }
  if (!(total > 0.0)) throw InferenceError("joint pragmatic posterior has no mass");

  out.over_w.mass.assign(w_prior.size(), 0.0);
  out.over_h.assign(nh, 0.0);
  for (std::size_t h = 0; h < w_prior.size(); ++h) {
    for (std::size_t j = 0; j < nh; ++j) {
      double& v = out.joint[h * nh + j];
      v /= total;
      out.over_w.mass[h] += v;
      out.over_h[j] += v;
    }
  }
  return out;
}

Policy l1_action_policy(const Environment& env, const Belief& posterior, const State& s,
                        const ListenerConfig& cfg) {
  return l0_action_policy(env, posterior, s, cfg);
}

PosteriorMoments::PosteriorMoments(const ResponseCache& cache, StateId s, const Belief& w_prior,
                                   std::vector<int> horizons, double beta_s1)
    : horizons_(std::move(horizons)),
      num_utterances_(cache.num_utterances()),
      k_(cache.environment().num_features()) {
  check_prior(cache, w_prior);
  for (int h : horizons_) {
    if (h < 1) throw ConfigError("horizon must be >= 1");
  }
  const Environment& env = cache.environment();
  const std::size_t nh = horizons_.size();
  mass_.assign(nh * num_utterances_, 0.0);
  weighted_.assign(nh * num_utterances_ * k_, 0.0);

  SpeakerEvaluator speaker(cache, s, beta_s1);
  for (std::size_t w = 0; w < w_prior.size(); ++w) {
    const double prior = w_prior.mass[w];
    if (prior == 0.0) continue;
    const auto row = env.hypothesis_row(w);
    speaker.load(row);
    for (std::size_t h = 0; h < nh; ++h) {
      const auto probs = speaker.distribution(horizons_[h]);
      double* m = mass_.data() + h * num_utterances_;
      double* ws = weighted_.data() + h * num_utterances_ * k_;
      for (std::size_t u = 0; u < num_utterances_; ++u) {
        const double p = probs[u] * prior;
        m[u] += p;
        double* dst = ws + u * k_;
        for (std::size_t i = 0; i < k_; ++i) dst[i] += p * row[i];
      }
    }
  }
}

std::size_t PosteriorMoments::index_of(int horizon) const {
  const auto it = std::find(horizons_.begin(), horizons_.end(), horizon);
  if (it == horizons_.end()) {
    throw ConfigError(fmt::format("horizon {} was not precomputed", horizon));
  }
  return static_cast<std::size_t>(it - horizons_.begin());
}

std::vector<double> PosteriorMoments::fixed_mean(std::size_t h, std::size_t u) const {
  const double z = mass(h, u);
  if (!(z > 0.0)) throw InferenceError("pragmatic posterior has no mass");
  const auto ws = weighted(h, u);
  std::vector<double> mean(ws.begin(), ws.end());
  for (double& x : mean) x /= z;
  return mean;
}

std::vector<double> PosteriorMoments::joint_mean(const HorizonPrior& prior, std::size_t u) const {
  std::vector<double> mean(k_, 0.0);
  double z = 0.0;
  for (std::size_t j = 0; j < prior.support.size(); ++j) {
    const std::size_t h = index_of(prior.support[j]);
    z += prior.mass[j] * mass(h, u);
    const auto ws = weighted(h, u);
    for (std::size_t i = 0; i < k_; ++i) mean[i] += prior.mass[j] * ws[i];
  }
  if (!(z > 0.0)) throw InferenceError("joint pragmatic posterior has no mass");
  for (double& x : mean) x /= z;
  return mean;
}

std::vector<double> PosteriorMoments::horizon_posterior(const HorizonPrior& prior,
                                                        std::size_t u) const {
  std::vector<double> post(prior.support.size());
  double z = 0.0;
  for (std::size_t j = 0; j < prior.support.size(); ++j) {
    post[j] = prior.mass[j] * mass(index_of(prior.support[j]), u);
    z += post[j];
  }
  if (!(z > 0.0)) throw InferenceError("joint pragmatic posterior has no mass");
  for (double& p : post) p /= z;
  return post;
}

}  // namespace lrd
