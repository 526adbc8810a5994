#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentos/components.hpp"
#include "agentos/runtime.hpp"

namespace agentos {

inline constexpr double kDefaultIntentThreshold = 0.55;

enum class IntentSource { Explicit = 0, Lexical = 1, Semantic = 2 };

std::string_view to_string(IntentSource source);

struct IntentCandidate {
    std::string action;
    double score = 0.0;
    IntentSource source = IntentSource::Semantic;

    bool operator==(const IntentCandidate&) const = default;
};

/// Candidates for one message, best first: EXPLICIT before LEXICAL before
/// SEMANTIC, then score, then registration order. Built-in actions are only
/// reachable through an explicit proposal.
std::vector<IntentCandidate> recognize_intent(const Runtime& runtime, std::string_view message_text,
                                              const std::optional<std::string>& model_proposed,
                                              const State& state);

/// Runs the handler of the first candidate that validates, or NONE. Exactly one
/// handler runs; exceptions from it become a failed result.
ActionResult select_and_execute(Runtime& runtime, const std::vector<IntentCandidate>& candidates,
                                const MemoryRecord& message, const State& state,
                                const ActionOptions& options = {});

/// NONE, IGNORE and CONTINUE.
std::vector<ActionDef> builtin_actions();

/// True when `phrase` (name or simile, '_' or ' ' separated) occurs as a whole
/// run of tokens in `text`, ignoring case.
bool contains_phrase(std::string_view text, std::string_view phrase);

} // namespace agentos
