#include "agentos/evaluators.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <spdlog/spdlog.h>

#include "agentos/runtime.hpp"
#include "agentos/util.hpp"

namespace agentos {

namespace {

constexpr const char* kFactExtractionPrompt =
    "Extract durable facts stated in the conversation below. Write one fact per line "
    "and nothing else. Write NONE when there are no facts.\n\n";

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') {
            if (!trim(current).empty()) out.emplace_back(trim(current));
            current.clear();
            continue;
        }
        current.push_back(c);
        const bool terminal = c == '.' || c == '!' || c == '?';
        const bool boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
        if (terminal && boundary) {
            if (!trim(current).empty()) out.emplace_back(trim(current));
            current.clear();
        }
    }
    if (!trim(current).empty()) out.emplace_back(trim(current));
    return out;
}

std::vector<std::string> existing_facts(const Runtime& runtime, const std::string& room) {
    std::vector<std::string> out;
    for (const auto& r : runtime.memory().room_records(room, runtime.memory().count() + 1, MemoryKind::Fact)) {
        out.push_back(r.content.text);
    }
    return out;
}

std::vector<std::string> model_facts(Runtime& runtime, std::span<const MemoryRecord> transcript) {
    auto provider = runtime.get_setting("FACT_EXTRACTION_MODEL");
    if (!provider || provider->empty() || !runtime.models().contains(*provider)) return {};

    std::string prompt = kFactExtractionPrompt;
    for (const auto& r : transcript) {
        prompt += (r.user_id == runtime.agent_id() ? runtime.character().name : r.user_id) + ": " +
                  r.content.text + "\n";
    }
    CompletionRequest req;
    req.prompt = prompt;
    std::vector<std::string> out;
    for (auto line : split_lines(runtime.models().complete(*provider, req))) {
        std::string_view v = trim(line);
        if (v.starts_with("- ")) v = trim(v.substr(2));
        if (v.empty() || to_lower(v) == "none") continue;
        out.emplace_back(v);
    }
    return out;
}

} // namespace

std::vector<std::string> extract_rule_facts(std::string_view text) {
    static const std::regex copula(R"(^\s*(\S.*?)\s+(is|likes)\s+(\S.*)$)", std::regex::icase);
    std::vector<std::string> out;
    for (const auto& sentence : split_sentences(text)) {
        if (sentence.ends_with('?')) continue;
        if (std::regex_match(sentence, copula)) out.push_back(sentence);
    }
    return out;
}

EvaluatorDef fact_evaluator() {
    EvaluatorDef def;
    def.name = "fact";
    def.description = "Extracts facts from the conversation into long-term memory.";
    def.should_run = [](const MemoryRecord&, const State&) { return true; };
    def.run = [](Runtime& runtime, const MemoryRecord& message, std::span<const MemoryRecord> transcript) {
        std::vector<std::string> candidates;
        for (const auto& r : transcript) {
            if (r.kind != MemoryKind::Message) continue;
            for (auto& f : extract_rule_facts(r.content.text)) candidates.push_back(std::move(f));
        }
        try {
            for (auto& f : model_facts(runtime, transcript)) candidates.push_back(std::move(f));
        } catch (const std::exception& e) {
            spdlog::warn("model fact extraction failed: {}", e.what());
        }

        const auto known = existing_facts(runtime, message.room_id);
        std::set<std::string> seen(known.begin(), known.end());
        std::vector<EvaluationOutcome> out;
        for (auto& f : candidates) {
            if (!seen.insert(f).second) continue;
            EvaluationOutcome o;
            o.kind = OutcomeKind::Fact;
            o.text = std::move(f);
            out.push_back(std::move(o));
        }
        return out;
    };
    return def;
}

EvaluatorDef goal_evaluator() {
    EvaluatorDef def;
    def.name = "goal";
    def.description = "Marks goal objectives complete when the agent's replies state them.";
    def.should_run = [](const MemoryRecord&, const State&) { return true; };
    def.run = [](Runtime& runtime, const MemoryRecord& message, std::span<const MemoryRecord> transcript) {
        std::vector<std::string> replies;
        for (const auto& r : transcript) {
            if (r.user_id == runtime.agent_id()) replies.push_back(to_lower(r.content.text));
        }
        std::vector<EvaluationOutcome> out;
        for (const auto& goal : runtime.memory().goals(message.room_id)) {
            if (goal.status != GoalStatus::InProgress) continue;
            for (std::size_t i = 0; i < goal.objectives.size(); ++i) {
                const auto& obj = goal.objectives[i];
                if (obj.completed || trim(obj.description).empty()) continue;
                const auto needle = to_lower(obj.description);
                const bool stated = std::any_of(replies.begin(), replies.end(), [&](const std::string& t) {
                    return t.find(needle) != std::string::npos;
                });
                if (stated) {
                    EvaluationOutcome o;
                    o.kind = OutcomeKind::GoalUpdate;
                    o.goal_id = goal.id;
                    o.objective_index = i;
                    o.completed = true;
                    out.push_back(std::move(o));
                }
            }
        }
        return out;
    };
    return def;
}

std::vector<EvaluationOutcome> run_evaluators(Runtime& runtime, const MemoryRecord& message,
                                              const State& state) {
    const auto window = runtime.memory().recent(message.room_id, runtime.config().conversation_length);
    std::vector<EvaluationOutcome> all;
    for (const auto& evaluator : runtime.evaluators()) {
        try {
            if (!evaluator.should_run(message, state)) continue;
            auto outcomes = evaluator.run(runtime, message, window);
            for (auto& o : outcomes) {
                switch (o.kind) {
                    case OutcomeKind::Fact: {
                        if (trim(o.text).empty()) continue;
                        const auto known = existing_facts(runtime, message.room_id);
                        if (std::find(known.begin(), known.end(), o.text) != known.end()) continue;
                        runtime.remember(message.room_id, Content{o.text, std::nullopt, {}}, MemoryKind::Fact);
                        break;
                    }
                    case OutcomeKind::GoalUpdate:
                        runtime.memory().update_objective(o.goal_id, o.objective_index, o.completed);
                        break;
                    case OutcomeKind::Reflection:
                        runtime.remember(message.room_id, Content{o.text, std::nullopt, {}},
                                         MemoryKind::Reflection);
                        break;
                }
                all.push_back(std::move(o));
            }
        } catch (const std::exception& e) {
            spdlog::warn("evaluator {} failed: {}", evaluator.name, e.what());
        } catch (...) {
            spdlog::warn("evaluator {} failed", evaluator.name);
        }
    }
    return all;
}

} // namespace agentos
