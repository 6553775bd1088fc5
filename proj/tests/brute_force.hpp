#ifndef LRD_TESTS_BRUTE_FORCE_HPP
#define LRD_TESTS_BRUTE_FORCE_HPP

// Reference implementations by direct nested summation. No response cache,
// no belief-mean shortcut, long double throughout. Only the enumerated spaces
// (actions, states, hypotheses) are shared with the library.

#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

#include "lrd/bandit.hpp"
#include "lrd/language.hpp"

namespace lrd::oracle {

using Real = long double;

inline Real reward_of(const Action& a, const RewardWeights& w) {
  Real r = 0;
  for (std::size_t i = 0; i < w.size(); ++i) r += static_cast<Real>(w.w[i]) * a.features.bits[i];
  return r;
}

inline std::vector<Real> normalize_exp(std::vector<Real> logits) {
  Real top = logits.front();
  for (Real x : logits) top = std::max(top, x);
  Real z = 0;
  for (Real& x : logits) {
    x = std::exp(x - top);
    z += x;
  }
  for (Real& x : logits) x /= z;
  return logits;
}

// pi_L0(. | u, s), aligned with s.action_ids. Uniform prior over the grid.
inline std::vector<Real> l0_policy(const Environment& env, const Utterance& u, const State& s,
                                   Real beta_l0) {
  std::vector<Real> p(s.size(), 0);
  if (const auto* ins = std::get_if<Instruction>(&u)) {
    bool present = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.action_ids[i] == ins->action) {
        p[i] = 1;
        present = true;
      }
    }
    if (!present) {
      for (Real& x : p) x = Real(1) / s.size();
    }
    return p;
  }
  const auto& d = std::get<Description>(u);
  std::size_t consistent = 0;
  for (const auto& w : env.hypotheses()) consistent += (w.w[d.feature] == d.value);
  std::vector<Real> logits(s.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Action& a = env.action(s.action_ids[i]);
    Real expected = 0;
    for (const auto& w : env.hypotheses()) {
      if (w.w[d.feature] == d.value) expected += reward_of(a, w) / consistent;
    }
    logits[i] = beta_l0 * expected;
  }
  return normalize_exp(logits);
}

inline Real present(const Environment& env, const Utterance& u, const State& s,
                    const RewardWeights& w, Real beta_l0) {
  const auto p = l0_policy(env, u, s, beta_l0);
  Real total = 0;
  for (std::size_t i = 0; i < s.size(); ++i) total += p[i] * reward_of(env.action(s.action_ids[i]), w);
  return total;
}

inline Real future(const Environment& env, const Utterance& u, const RewardWeights& w,
                   Real beta_l0) {
  Real total = 0;
  for (std::size_t s = 0; s < env.states().size(); ++s) {
    total += env.state_prior()[s] * present(env, u, env.state(s), w, beta_l0);
  }
  return total;
}

inline Real utility(const Environment& env, const Utterance& u, const State& s,
                    const RewardWeights& w, int horizon, Real beta_l0) {
  return present(env, u, s, w, beta_l0) + (horizon - 1) * future(env, u, w, beta_l0);
}

inline std::vector<Real> speaker(const Environment& env, const std::vector<Utterance>& utts,
                                 const State& s, const RewardWeights& w, int horizon,
                                 Real beta_l0, Real beta_s1) {
  std::vector<Real> logits;
  for (const auto& u : utts) logits.push_back(beta_s1 * utility(env, u, s, w, horizon, beta_l0));
  return normalize_exp(logits);
}

// L1(w | s, u, H) with a uniform grid prior.
inline std::vector<Real> l1_fixed(const Environment& env, const std::vector<Utterance>& utts,
                                  std::size_t u, const State& s, int horizon, Real beta_l0,
                                  Real beta_s1) {
  std::vector<Real> post;
  Real z = 0;
  for (const auto& w : env.hypotheses()) {
    post.push_back(speaker(env, utts, s, w, horizon, beta_l0, beta_s1)[u]);
    z += post.back();
  }
  for (Real& x : post) x /= z;
  return post;
}

// joint[w][h] with a uniform grid prior and the given horizon prior.
inline std::vector<std::vector<Real>> l1_joint(const Environment& env,
                                               const std::vector<Utterance>& utts, std::size_t u,
                                               const State& s, const std::vector<int>& horizons,
                                               const std::vector<Real>& h_mass, Real beta_l0,
                                               Real beta_s1) {
  std::vector<std::vector<Real>> joint;
  Real z = 0;
  for (const auto& w : env.hypotheses()) {
    std::vector<Real> row;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      row.push_back(speaker(env, utts, s, w, horizons[h], beta_l0, beta_s1)[u] * h_mass[h]);
      z += row.back();
    }
    joint.push_back(row);
  }
  for (auto& row : joint) {
    for (Real& x : row) x /= z;
  }
  return joint;
}

}  // namespace lrd::oracle

#endif  // LRD_TESTS_BRUTE_FORCE_HPP
