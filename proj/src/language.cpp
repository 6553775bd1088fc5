#include "lrd/language.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "lrd/error.hpp"

namespace lrd {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::string_view to_string(UtteranceKind kind) {
  switch (kind) {
    case UtteranceKind::kInstructionsOnly: return "instructions_only";
    case UtteranceKind::kDescriptionsOnly: return "descriptions_only";
    case UtteranceKind::kBoth: return "both";
  }
  return "both";
}

UtteranceKind parse_utterance_kind(std::string_view name) {
  if (name == "instructions_only") return UtteranceKind::kInstructionsOnly;
  if (name == "descriptions_only") return UtteranceKind::kDescriptionsOnly;
  if (name == "both") return UtteranceKind::kBoth;
  throw ConfigError(fmt::format("unknown utterance kind '{}'", name));
}

UtteranceSet enumerate_utterances(const Environment& env, UtteranceKind kind) {
  UtteranceSet set;
  set.kind = kind;
  if (kind != UtteranceKind::kDescriptionsOnly) {
    for (const Action& a : env.actions()) set.utterances.emplace_back(Instruction{a.id});
  }
  if (kind != UtteranceKind::kInstructionsOnly) {
    for (std::size_t f = 0; f < env.num_features(); ++f) {
      for (int v : env.value_set()) set.utterances.emplace_back(Description{f, v});
    }
  }
  return set;
}

bool instruction_denotation(const Instruction& u, const Action& a) { return u.action == a.id; }

bool description_consistent(const Description& u, const RewardWeights& w) {
  return u.feature < w.size() && w[u.feature] == u.value;
}

void check_utterance(const Environment& env, const Utterance& u) {
  std::visit(Overloaded{
                 [&](const Instruction& i) {
                   if (i.action >= env.actions().size()) {
                     throw ConfigError(fmt::format("instruction names unknown action {}", i.action));
                   }
                 },
                 [&](const Description& d) {
                   if (d.feature >= env.num_features()) {
                     throw ConfigError(fmt::format("description names unknown feature {}", d.feature));
                   }
                   const auto& vs = env.value_set();
                   if (!std::binary_search(vs.begin(), vs.end(), d.value)) {
                     throw ConfigError(fmt::format("description value {} outside value set", d.value));
                   }
                 },
             },
             u);
}

nlohmann::json utterance_to_json(const Utterance& u) {
  return std::visit(Overloaded{
                        [](const Instruction& i) {
                          return nlohmann::json{{"type", "instruction"}, {"action", i.action}};
                        },
                        [](const Description& d) {
                          return nlohmann::json{
                              {"type", "description"}, {"feature", d.feature}, {"value", d.value}};
                        },
                    },
                    u);
}

Utterance utterance_from_json(const nlohmann::json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "instruction") return Instruction{j.at("action").get<ActionId>()};
    if (type == "description") {
      return Description{j.at("feature").get<std::size_t>(), j.at("value").get<int>()};
    }
    throw ConfigError(fmt::format("unknown utterance type '{}'", type));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("utterance: {}", e.what()));
  }
}

std::string utterance_token(const Utterance& u) {
  return std::visit(Overloaded{
                        [](const Instruction& i) { return fmt::format("instruction:{}", i.action); },
                        [](const Description& d) {
                          return fmt::format("description:{}:{}", d.feature, d.value);
                        },
                    },
                    u);
}

std::string display_name(const Environment& env, const Utterance& u) {
  return std::visit(Overloaded{
                        [&](const Instruction& i) {
                          return fmt::format("pick {}", env.action_name(i.action));
                        },
                        [&](const Description& d) {
                          return fmt::format("{} is {:+d}", env.feature_names().at(d.feature),
                                             d.value);
                        },
                    },
                    u);
}

}  // namespace lrd
