#include "lrd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <fmt/core.h>

#include "lrd/error.hpp"

namespace lrd {

namespace {

std::vector<double> future_rewards_l0(const ResponseCache& cache, std::span<const double> w) {
  std::vector<double> out(cache.num_utterances());
  for (std::size_t u = 0; u < out.size(); ++u) out[u] = future_utility(cache, u, w);
  return out;
}

double expectation(std::span<const double> probs, std::span<const double> values) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) total += probs[i] * values[i];
  return total;
}

std::vector<int> sorted_union(std::initializer_list<std::span<const int>> lists) {
  std::set<int> all;
  for (auto list : lists) all.insert(list.begin(), list.end());
  return {all.begin(), all.end()};
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kFutureReward: return "future_reward";
    case Metric::kPresentReward: return "present_reward";
    case Metric::kGain: return "gain";
    case Metric::kUtteranceProb: return "utterance_prob";
    case Metric::kMapIsDescription: return "map_is_description";
  }
  return "future_reward";
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    if (j.contains("environment")) c.environment = EnvironmentConfig::from_json(j.at("environment"));
    if (j.contains("true_w")) c.true_w.w = j.at("true_w").get<std::vector<int>>();
    if (j.contains("beta_l0")) c.beta_l0 = j.at("beta_l0").get<double>();
    if (j.contains("beta_s1")) c.beta_s1 = j.at("beta_s1").get<double>();
    if (j.contains("horizons")) c.horizons = j.at("horizons").get<std::vector<int>>();
    if (j.contains("utterance_kinds")) {
      c.utterance_kinds.clear();
      for (const auto& k : j.at("utterance_kinds")) {
        c.utterance_kinds.push_back(parse_utterance_kind(k.get<std::string>()));
      }
    }
    if (j.contains("pragmatics_kind")) {
      c.pragmatics_kind = parse_utterance_kind(j.at("pragmatics_kind").get<std::string>());
    }
    if (j.contains("horizon_prior")) c.horizon_prior = j.at("horizon_prior").get<std::vector<int>>();
    if (j.contains("misaligned_speaker_h")) c.misaligned_speaker_h = j.at("misaligned_speaker_h").get<int>();
    if (j.contains("report_state")) c.report_state = j.at("report_state").get<StateId>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("run config: {}", e.what()));
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}': {}", path.string(), e.what()));
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["environment"] = environment.to_json();
  j["true_w"] = true_w.w;
  j["beta_l0"] = beta_l0;
  j["beta_s1"] = beta_s1;
  j["horizons"] = horizons;
  auto kinds = nlohmann::json::array();
  for (UtteranceKind k : utterance_kinds) kinds.push_back(std::string(to_string(k)));
  j["utterance_kinds"] = kinds;
  j["pragmatics_kind"] = std::string(to_string(pragmatics_kind));
  j["horizon_prior"] = horizon_prior;
  j["misaligned_speaker_h"] = misaligned_speaker_h;
  j["report_state"] = report_state;
  j["output_dir"] = output_dir;
  return j;
}

void RunConfig::validate(const Environment& env) const {
  if (horizons.empty()) throw ConfigError("horizons must not be empty");
  for (int h : horizons) {
    if (h < 1) throw ConfigError(fmt::format("horizon {} must be >= 1", h));
  }
  if (utterance_kinds.empty()) throw ConfigError("utterance_kinds must not be empty");
  if (!(beta_l0 >= 0.0) || !std::isfinite(beta_l0)) throw ConfigError("beta_l0 must be finite and >= 0");
  if (!(beta_s1 >= 0.0) || !std::isfinite(beta_s1)) throw ConfigError("beta_s1 must be finite and >= 0");
  if (misaligned_speaker_h < 1) throw ConfigError("misaligned_speaker_h must be >= 1");
  HorizonPrior::uniform(horizon_prior).validate();
  env.check_weights(true_w);
  if (report_state >= env.states().size()) {
    throw ConfigError(fmt::format("report_state {} out of range (have {} states)", report_state,
                                  env.states().size()));
  }
}

double evaluate_listener_future_reward(const Environment& env, std::span<const Policy> policies,
                                       std::span<const double> true_w) {
  const auto& states = env.states();
  if (policies.size() != states.size()) {
    throw ConfigError(fmt::format("incomplete policy: {} state policies for {} states",
                                  policies.size(), states.size()));
  }
  double total = 0.0;
  for (StateId s = 0; s < states.size(); ++s) {
    if (!(policies[s].state == states[s])) {
      throw ConfigError(fmt::format("incomplete policy: entry {} is not for state {}", s, s));
    }
    total += env.state_prior()[s] * expected_reward(env, policies[s], true_w);
  }
  return total;
}

double future_reward_of_mean(const Environment& env, std::span<const double> mean, double beta,
                             std::span<const double> true_w) {
  double total = 0.0;
  for (StateId s = 0; s < env.states().size(); ++s) {
    const Policy p = policy_from_mean_weights(env, mean, env.state(s), beta);
    total += env.state_prior()[s] * expected_reward(env, p, true_w);
  }
  return total;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<SweepRecord> run_speaker_sweep(const Environment& env, const RunConfig& cfg) {
  cfg.validate(env);
  const auto w = to_doubles(cfg.true_w);
  const Belief prior = Belief::uniform(env);
  const ListenerConfig listener{cfg.beta_l0};
  const std::size_t num_states = env.states().size();

  // Per-utterance report: the "both" set when swept, else the first kind.
  const bool has_both = std::find(cfg.utterance_kinds.begin(), cfg.utterance_kinds.end(),
                                  UtteranceKind::kBoth) != cfg.utterance_kinds.end();
  const UtteranceKind report_kind = has_both ? UtteranceKind::kBoth : cfg.utterance_kinds.front();

  std::vector<SweepRecord> records;
  for (UtteranceKind kind : cfg.utterance_kinds) {
    const ResponseCache cache(env, enumerate_utterances(env, kind), listener, prior);
    const auto l0_future = future_rewards_l0(cache, w);
    const std::string condition(to_string(kind));

    struct Cell {
      double future, present;
      bool map_is_description;
      std::vector<double> dist;
    };
    std::vector<Cell> cells(cfg.horizons.size() * num_states);
    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
      const int h = cfg.horizons[i / num_states];
      const StateId s = i % num_states;
      auto dist = speaker_distribution(cache, s, w, SpeakerConfig{cfg.beta_s1, h});
      std::vector<double> present(cache.num_utterances());
      for (std::size_t u = 0; u < present.size(); ++u) present[u] = present_utility(cache, u, s, w);
      Cell& c = cells[i];
      c.future = expectation(dist, l0_future);
      c.present = expectation(dist, present);
      c.map_is_description = is_description(cache.utterances()[argmax(dist)]);
      c.dist = std::move(dist);
    });

    for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
      const int h = cfg.horizons[hi];
      for (StateId s = 0; s < num_states; ++s) {
        const Cell& c = cells[hi * num_states + s];
        records.push_back({"speaker", condition, h, std::nullopt, s, Metric::kFutureReward, c.future});
        records.push_back({"speaker", condition, h, std::nullopt, s, Metric::kPresentReward, c.present});
        records.push_back({"speaker", condition, h, std::nullopt, s, Metric::kMapIsDescription,
                           c.map_is_description ? 1.0 : 0.0});
      }
    }
    if (kind == report_kind) {
      for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
        const Cell& c = cells[hi * num_states + cfg.report_state];
        for (std::size_t u = 0; u < cache.num_utterances(); ++u) {
          records.push_back({"utterances",
                             fmt::format("{}|{}", condition, utterance_token(cache.utterances()[u])),
                             cfg.horizons[hi], std::nullopt, cfg.report_state,
                             Metric::kUtteranceProb, c.dist[u]});
        }
      }
    }
  }
  return records;
}

std::vector<SweepRecord> run_pragmatics_sweep(const Environment& env, const RunConfig& cfg) {
  cfg.validate(env);
  const auto w = to_doubles(cfg.true_w);
  const Belief prior = Belief::uniform(env);
  const ListenerConfig listener{cfg.beta_l0};
  const HorizonPrior h_prior = HorizonPrior::uniform(cfg.horizon_prior);
  const ResponseCache cache(env, enumerate_utterances(env, cfg.pragmatics_kind), listener, prior);
  const auto l0_future = future_rewards_l0(cache, w);
  const std::size_t num_states = env.states().size();
  const std::size_t nu = cache.num_utterances();

  // Horizons the listener may assume, and horizons the speaker may have.
  const std::vector<int> assumed = sorted_union({cfg.horizons, cfg.horizon_prior});
  const int mis_h = cfg.misaligned_speaker_h;
  const std::vector<int> spoken = sorted_union({cfg.horizons, std::span<const int>(&mis_h, 1)});

  struct Cell {
    std::vector<double> known, misaligned, joint;  // per cfg.horizons entry
  };
  std::vector<Cell> cells(num_states);
  parallel_for(num_states, cfg.threads, [&](std::size_t s) {
    const PosteriorMoments moments(cache, s, prior, assumed, cfg.beta_s1);

    // Gain of each listener reading over L0, per utterance.
    std::vector<double> l1_gain(assumed.size() * nu);
    std::vector<double> joint_gain(nu);
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t a = 0; a < assumed.size(); ++a) {
        l1_gain[a * nu + u] =
            future_reward_of_mean(env, moments.fixed_mean(a, u), cfg.beta_l0, w) - l0_future[u];
      }
      joint_gain[u] =
          future_reward_of_mean(env, moments.joint_mean(h_prior, u), cfg.beta_l0, w) - l0_future[u];
    }
    auto gain_row = [&](int assumed_h) {
      const std::size_t a = moments.index_of(assumed_h);
      return std::span<const double>(l1_gain.data() + a * nu, nu);
    };

    std::map<int, std::vector<double>> speaker;
    for (int h : spoken) speaker[h] = speaker_distribution(cache, s, w, SpeakerConfig{cfg.beta_s1, h});

    Cell& c = cells[s];
    for (int h : cfg.horizons) {
      c.known.push_back(expectation(speaker[h], gain_row(h)));
      c.misaligned.push_back(expectation(speaker[mis_h], gain_row(h)));
      c.joint.push_back(expectation(speaker[h], joint_gain));
    }
  });

  std::vector<SweepRecord> records;
  for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
    const int h = cfg.horizons[hi];
    for (StateId s = 0; s < num_states; ++s) {
      records.push_back({"pragmatics", "known", h, h, s, Metric::kGain, cells[s].known[hi]});
    }
  }
  for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
    const int h = cfg.horizons[hi];
    for (StateId s = 0; s < num_states; ++s) {
      records.push_back({"pragmatics", "misaligned", mis_h, h, s, Metric::kGain, cells[s].misaligned[hi]});
    }
  }
  for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
    const int h = cfg.horizons[hi];
    for (StateId s = 0; s < num_states; ++s) {
      records.push_back({"pragmatics", "joint", h, std::nullopt, s, Metric::kGain, cells[s].joint[hi]});
    }
  }
  return records;
}

nlohmann::json explain_state(const Environment& env, const RunConfig& cfg, StateId state,
                             int horizon) {
  cfg.validate(env);
  if (state >= env.states().size()) {
    throw ConfigError(fmt::format("state {} out of range (have {} states)", state, env.states().size()));
  }
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  const UtteranceKind kind = UtteranceKind::kBoth;
  const ResponseCache cache(env, enumerate_utterances(env, kind), ListenerConfig{cfg.beta_l0},
                            Belief::uniform(env));
  const auto w = to_doubles(cfg.true_w);
  const auto dist = speaker_distribution(cache, state, w, SpeakerConfig{cfg.beta_s1, horizon});

  nlohmann::json j;
  j["state_id"] = state;
  auto actions = nlohmann::json::array();
  for (ActionId a : env.state(state).action_ids) {
    actions.push_back({{"action", a}, {"name", env.action_name(a)}, {"reward", reward(env.action(a), cfg.true_w)}});
  }
  j["actions"] = actions;
  j["horizon"] = horizon;
  j["true_w"] = cfg.true_w.w;
  j["utterance_kind"] = std::string(to_string(kind));
  auto rows = nlohmann::json::array();
  auto by_token = nlohmann::json::object();
  for (std::size_t u = 0; u < dist.size(); ++u) {
    const Utterance& utt = cache.utterances()[u];
    rows.push_back({{"utterance", utterance_to_json(utt)},
                    {"label", display_name(env, utt)},
                    {"prob", dist[u]},
                    {"present_utility", present_utility(cache, u, state, w)},
                    {"future_utility", future_utility(cache, u, w)}});
    by_token[utterance_token(utt)] = dist[u];
  }
  j["utterances"] = rows;
  j["distribution"] = by_token;
  const std::size_t best = argmax(dist);
  j["map"] = {{"utterance", utterance_to_json(cache.utterances()[best])},
              {"label", display_name(env, cache.utterances()[best])},
              {"prob", dist[best]}};
  return j;
}

nlohmann::json posterior_to_json(const Environment& env, const JointPosterior& posterior,
                                 const HorizonPrior& h_prior, std::size_t top_k) {
  nlohmann::json j;
  j["mean_w"] = mean_weights(env, posterior.over_w);
  std::vector<std::size_t> order(posterior.over_w.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  top_k = std::min(top_k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = posterior.over_w.mass[a], mb = posterior.over_w.mass[b];
                      return ma != mb ? ma > mb : a < b;
                    });
  auto top = nlohmann::json::array();
  for (std::size_t i = 0; i < top_k; ++i) {
    top.push_back({{"w", env.hypotheses()[order[i]].w}, {"mass", posterior.over_w.mass[order[i]]}});
  }
  j["top"] = top;
  auto horizons = nlohmann::json::array();
  for (std::size_t i = 0; i < h_prior.support.size(); ++i) {
    horizons.push_back({{"horizon", h_prior.support[i]}, {"mass", posterior.over_h[i]}});
  }
  j["horizon_marginal"] = horizons;
  return j;
}

nlohmann::json environment_summary(const Environment& env) {
  nlohmann::json j;
  j["num_features"] = env.num_features();
  j["feature_names"] = env.feature_names();
  j["num_actions"] = env.actions().size();
  j["num_states"] = env.states().size();
  j["num_hypotheses"] = env.hypotheses().size();
  j["value_set"] = env.value_set();
  nlohmann::json counts;
  for (UtteranceKind k : {UtteranceKind::kInstructionsOnly, UtteranceKind::kDescriptionsOnly,
                          UtteranceKind::kBoth}) {
    counts[std::string(to_string(k))] = enumerate_utterances(env, k).size();
  }
  j["num_utterances"] = counts;
  auto actions = nlohmann::json::array();
  for (const Action& a : env.actions()) {
    actions.push_back({{"id", a.id}, {"name", env.action_name(a.id)},
                       {"features", std::vector<int>(a.features.bits.begin(), a.features.bits.end())}});
  }
  j["actions"] = actions;
  return j;
}

nlohmann::json aggregate_means(const Environment& env, std::span<const SweepRecord> records) {
  using Key = std::tuple<std::string, std::string, int, int, std::string>;
  // Keep first-seen order so the summary follows the CSV layout.
  std::vector<Key> order;
  std::map<Key, std::pair<double, double>> sums;
  for (const SweepRecord& r : records) {
    if (!r.state_id) continue;
    Key key{r.experiment, r.condition, r.speaker_h, r.assumed_h.value_or(-1),
            std::string(to_string(r.metric))};
    auto [it, inserted] = sums.try_emplace(key, 0.0, 0.0);
    if (inserted) order.push_back(key);
    const double p = env.state_prior()[*r.state_id];
    it->second.first += p * r.value;
    it->second.second += p;
  }
  auto out = nlohmann::json::array();
  for (const Key& key : order) {
    const auto& [sum, weight] = sums.at(key);
    nlohmann::json row{{"experiment", std::get<0>(key)},
                       {"condition", std::get<1>(key)},
                       {"speaker_h", std::get<2>(key)},
                       {"metric", std::get<4>(key)},
                       {"mean", sum / weight}};
    row["assumed_h"] = std::get<3>(key) < 0 ? nlohmann::json(nullptr) : nlohmann::json(std::get<3>(key));
    out.push_back(row);
  }
  return out;
}

std::string format_csv(std::span<const SweepRecord> records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const SweepRecord& r : records) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.experiment, r.condition, r.speaker_h,
                       r.assumed_h ? fmt::format("{}", *r.assumed_h) : std::string(),
                       r.state_id ? fmt::format("{}", *r.state_id) : std::string(),
                       to_string(r.metric), r.value);
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << contents;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

void emit_outputs(const Environment& env, const RunConfig& cfg, std::span<const NamedTable> tables) {
  for (const NamedTable& t : tables) {
    if (t.records.empty()) throw ConfigError(fmt::format("table '{}' has no records", t.stem));
  }
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  nlohmann::json summary;
  summary["config"] = cfg.to_json();
  // Where the files land is not part of the experiment; keep the summary location-independent.
  summary["config"].erase("output_dir");
  summary["environment"] = environment_summary(env);
  nlohmann::json means;
  for (const NamedTable& t : tables) {
    write_file(dir / (t.stem + ".csv"), format_csv(t.records));
    means[t.stem] = aggregate_means(env, t.records);
  }
  summary["means"] = means;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace lrd
