#ifndef LRD_LANGUAGE_HPP
#define LRD_LANGUAGE_HPP

// Utterance space: instructions name an action, descriptions assert the
// reward value of a single feature.

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lrd/bandit.hpp"

namespace lrd {

struct Instruction {
  ActionId action = 0;
  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Description {
  std::size_t feature = 0;
  int value = 0;
  friend bool operator==(const Description&, const Description&) = default;
};

using Utterance = std::variant<Instruction, Description>;

inline bool is_description(const Utterance& u) {
  return std::holds_alternative<Description>(u);
}

enum class UtteranceKind { kInstructionsOnly, kDescriptionsOnly, kBoth };

std::string_view to_string(UtteranceKind kind);
// Accepts "instructions_only", "descriptions_only", "both". Throws ConfigError.
UtteranceKind parse_utterance_kind(std::string_view name);

struct UtteranceSet {
  UtteranceKind kind = UtteranceKind::kBoth;
  std::vector<Utterance> utterances;

  std::size_t size() const { return utterances.size(); }
  const Utterance& operator[](std::size_t i) const { return utterances[i]; }
};

// Instructions by action id, then descriptions by (feature, value).
UtteranceSet enumerate_utterances(const Environment& env, UtteranceKind kind);

bool instruction_denotation(const Instruction& u, const Action& a);
bool description_consistent(const Description& u, const RewardWeights& w);

// Throws ConfigError if u references an action, feature or value the
// environment does not have.
void check_utterance(const Environment& env, const Utterance& u);

// {"type":"instruction","action":i} / {"type":"description","feature":f,"value":v}
nlohmann::json utterance_to_json(const Utterance& u);
Utterance utterance_from_json(const nlohmann::json& j);

// Compact CSV-safe token: "instruction:3", "description:1:-2".
std::string utterance_token(const Utterance& u);

// Human-readable label for reports, e.g. "blue is -2" or "pick green-striped".
std::string display_name(const Environment& env, const Utterance& u);

}  // namespace lrd

#endif  // LRD_LANGUAGE_HPP
