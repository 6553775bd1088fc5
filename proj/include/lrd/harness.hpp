#ifndef LRD_HARNESS_HPP
#define LRD_HARNESS_HPP

// Experiment runner. Every number is an exact expectation: over the speaker's
// softmax utterance distribution and over the state prior. Nothing is sampled.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrd/bandit.hpp"
#include "lrd/language.hpp"
#include "lrd/literal_listener.hpp"
#include "lrd/pragmatics.hpp"
#include "lrd/speaker.hpp"

namespace lrd {

enum class Metric { kFutureReward, kPresentReward, kGain, kUtteranceProb, kMapIsDescription };

std::string_view to_string(Metric m);

struct SweepRecord {
  std::string experiment;
  std::string condition;
  int speaker_h = 0;
  std::optional<int> assumed_h;
  std::optional<StateId> state_id;
  Metric metric = Metric::kFutureReward;
  double value = 0.0;
};

struct RunConfig {
  EnvironmentConfig environment;
  RewardWeights true_w{{2, -2, 0, -1, 1, 0}};
  double beta_l0 = 3.0;
  double beta_s1 = 10.0;
  std::vector<int> horizons{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<UtteranceKind> utterance_kinds{UtteranceKind::kInstructionsOnly,
                                             UtteranceKind::kDescriptionsOnly,
                                             UtteranceKind::kBoth};
  // Utterance set the speaker uses in the pragmatics experiment.
  UtteranceKind pragmatics_kind = UtteranceKind::kBoth;
  // Support of the uniform horizon prior used by the joint listener.
  std::vector<int> horizon_prior{1, 2, 3, 4, 5, 10};
  // True speaker horizon in the misaligned-listener condition.
  int misaligned_speaker_h = 1;
  // Start state whose full utterance distribution is reported.
  StateId report_state = 0;
  std::string output_dir = "out";
  // 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;

  // Missing fields keep their defaults. Throws ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Checks everything that does not need the environment, then everything
  // that does. Throws ConfigError.
  void validate(const Environment& env) const;
};

// sum_s P(s) sum_a pi(a | s) R(a, w). `policies[s]` is the policy in state s.
// Throws ConfigError if a state has no policy or the policy is for another state.
double evaluate_listener_future_reward(const Environment& env, std::span<const Policy> policies,
                                       std::span<const double> true_w);

// Future reward of the softmax policy induced by a belief mean.
double future_reward_of_mean(const Environment& env, std::span<const double> mean, double beta,
                             std::span<const double> true_w);

// Literal listener under the speaker, per utterance kind x horizon x start state:
// future_reward, present_reward and map_is_description rows, plus the
// utterance distribution at cfg.report_state for every horizon.
std::vector<SweepRecord> run_speaker_sweep(const Environment& env, const RunConfig& cfg);

// Gain of L1 over L0 in future reward, per start state, for the known-horizon,
// misaligned and joint-horizon listeners.
std::vector<SweepRecord> run_pragmatics_sweep(const Environment& env, const RunConfig& cfg);

// Speaker distribution at one state and horizon, keyed by utterance.
nlohmann::json explain_state(const Environment& env, const RunConfig& cfg, StateId state,
                             int horizon);

// Posterior mean, top-k hypotheses and horizon marginal for a joint posterior.
nlohmann::json posterior_to_json(const Environment& env, const JointPosterior& posterior,
                                 const HorizonPrior& h_prior, std::size_t top_k = 5);

nlohmann::json environment_summary(const Environment& env);

// Means over start states (weighted by the state prior) for every
// (experiment, condition, speaker_h, assumed_h, metric) group that has a
// state_id.
nlohmann::json aggregate_means(const Environment& env, std::span<const SweepRecord> records);

inline constexpr std::string_view kCsvHeader =
    "experiment,condition,speaker_h,assumed_h,state_id,metric,value";

std::string format_csv(std::span<const SweepRecord> records);

// Writes <output_dir>/<stem>.csv for every named table plus
// <output_dir>/summary.json. Throws IoError with the offending path, or
// ConfigError if a table is empty.
struct NamedTable {
  std::string stem;
  std::vector<SweepRecord> records;
};
void emit_outputs(const Environment& env, const RunConfig& cfg, std::span<const NamedTable> tables);

// Runs fn(i) for i in [0, n) across `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lrd

#endif  // LRD_HARNESS_HPP
