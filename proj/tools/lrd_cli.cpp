// lrd: exact-enumeration simulator for speakers that design rewards through
// language, and for literal and pragmatic listeners.
//
// Usage:
//   lrd enumerate [--config cfg.json]
//   lrd explain --state 12 --horizon 3
//   lrd infer --state 12 --utterance description:1:-2 [--horizon 1]
//   lrd sweep-speaker --out out/
//   lrd sweep-pragmatics --out out/
//   lrd all --out out/
//
// Exit codes: 0 success, 2 invalid configuration, 3 I/O failure.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "lrd/error.hpp"
#include "lrd/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

lrd::Utterance parse_token(const std::string& token) {
  std::vector<std::string> parts;
  std::stringstream ss(token);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  try {
    if (parts.size() == 2 && parts[0] == "instruction") {
      return lrd::Instruction{std::stoul(parts[1])};
    }
    if (parts.size() == 3 && parts[0] == "description") {
      return lrd::Description{std::stoul(parts[1]), std::stoi(parts[2])};
    }
  } catch (const std::exception&) {
  }
  throw lrd::ConfigError(fmt::format(
      "bad utterance '{}': expected instruction:<action> or description:<feature>:<value>", token));
}

std::vector<int> parse_weights(const std::string& text) {
  std::vector<int> w;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    try {
      w.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw lrd::ConfigError(fmt::format("bad --true-w entry '{}'", part));
    }
  }
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linguistic reward design in linear bandits"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<double> beta_l0;
  std::optional<double> beta_s1;
  std::optional<std::string> true_w;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory for CSV and summary files");
  app.add_option("--beta-l0", beta_l0, "Literal listener softmax optimality");
  app.add_option("--beta-s1", beta_s1, "Speaker softmax optimality");
  app.add_option("--true-w", true_w, "True reward weights, comma separated");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* enumerate = app.add_subcommand("enumerate", "Print environment statistics");

  int state = 0;
  int horizon = 1;
  auto* explain = app.add_subcommand("explain", "Speaker utterance distribution for one state");
  explain->add_option("--state", state, "Start state id")->required();
  explain->add_option("--horizon", horizon, "Speaker horizon")->required();

  std::string utterance;
  std::optional<int> infer_horizon;
  auto* infer = app.add_subcommand("infer", "Pragmatic listener posterior for one utterance");
  infer->add_option("--state", state, "Start state id")->required();
  infer->add_option("--utterance", utterance, "instruction:<a> or description:<f>:<v>")->required();
  infer->add_option("--horizon", infer_horizon,
                    "Known speaker horizon (default: joint inference over the horizon prior)");

  auto* sweep_speaker = app.add_subcommand("sweep-speaker", "Literal listener reward by horizon");
  auto* sweep_pragmatics = app.add_subcommand("sweep-pragmatics", "Pragmatic gain by horizon");
  auto* all = app.add_subcommand("all", "Both sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    lrd::RunConfig cfg = config_path.empty() ? lrd::RunConfig{} : lrd::RunConfig::load(config_path);
    if (out_dir) cfg.output_dir = *out_dir;
    if (beta_l0) cfg.beta_l0 = *beta_l0;
    if (beta_s1) cfg.beta_s1 = *beta_s1;
    if (true_w) cfg.true_w.w = parse_weights(*true_w);
    if (threads) cfg.threads = *threads;

    const lrd::Environment env(cfg.environment);
    cfg.validate(env);

    if (*enumerate) {
      std::cout << lrd::environment_summary(env).dump(2) << '\n';
    } else if (*explain) {
      if (state < 0) throw lrd::ConfigError("--state must be non-negative");
      std::cout << lrd::explain_state(env, cfg, static_cast<lrd::StateId>(state), horizon).dump(2)
                << '\n';
    } else if (*infer) {
      if (state < 0 || static_cast<std::size_t>(state) >= env.states().size()) {
        throw lrd::ConfigError(fmt::format("--state {} out of range", state));
      }
      const lrd::ResponseCache cache(env, lrd::enumerate_utterances(env, cfg.pragmatics_kind),
                                     lrd::ListenerConfig{cfg.beta_l0}, lrd::Belief::uniform(env));
      const lrd::Utterance u = parse_token(utterance);
      const auto& utts = cache.utterances().utterances;
      const auto it = std::find(utts.begin(), utts.end(), u);
      if (it == utts.end()) {
        throw lrd::ConfigError(fmt::format("utterance '{}' is not in the {} set", utterance,
                                           lrd::to_string(cfg.pragmatics_kind)));
      }
      const auto h_prior = infer_horizon ? lrd::HorizonPrior::point_mass(*infer_horizon)
                                         : lrd::HorizonPrior::uniform(cfg.horizon_prior);
      const auto post = lrd::l1_posterior_joint(cache, static_cast<lrd::StateId>(state),
                                                static_cast<std::size_t>(it - utts.begin()),
                                                lrd::Belief::uniform(env), h_prior, cfg.beta_s1);
      auto j = lrd::posterior_to_json(env, post, h_prior);
      j["utterance"] = lrd::utterance_to_json(u);
      j["state_id"] = state;
      std::cout << j.dump(2) << '\n';
    } else {
      std::vector<lrd::NamedTable> tables;
      if (*sweep_speaker || *all) tables.push_back({"speaker_sweep", lrd::run_speaker_sweep(env, cfg)});
      if (*sweep_pragmatics || *all) {
        tables.push_back({"pragmatics_sweep", lrd::run_pragmatics_sweep(env, cfg)});
      }
      lrd::emit_outputs(env, cfg, tables);
      for (const auto& t : tables) {
        std::cerr << fmt::format("wrote {} rows to {}/{}.csv\n", t.records.size(), cfg.output_dir, t.stem);
      }
    }
  } catch (const lrd::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const lrd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
