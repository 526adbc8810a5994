#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentos/components.hpp"

namespace agentos {

class Runtime;

/// Sentences of the form "<subject> is <predicate>" or "<subject> likes <object>".
std::vector<std::string> extract_rule_facts(std::string_view text);

EvaluatorDef fact_evaluator();
EvaluatorDef goal_evaluator();

/// Runs every registered evaluator whose should_run holds, in registration
/// order, and persists the outcomes. A throwing evaluator is logged and skipped.
std::vector<EvaluationOutcome> run_evaluators(Runtime& runtime, const MemoryRecord& message,
                                              const State& state);

} // namespace agentos
