#include "agentos/action_engine.hpp"

#include <algorithm>
#include <map>

#include <spdlog/spdlog.h>

#include "agentos/util.hpp"

namespace agentos {

std::string_view to_string(IntentSource source) {
    switch (source) {
        case IntentSource::Explicit: return "EXPLICIT";
        case IntentSource::Lexical: return "LEXICAL";
        case IntentSource::Semantic: return "SEMANTIC";
    }
    return "SEMANTIC";
}

namespace {

bool contains_tokens(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

double intent_threshold(const Runtime& runtime) {
    if (auto v = runtime.get_setting("INTENT_THRESHOLD")) {
        try {
            return std::stod(*v);
        } catch (const std::exception&) {
            spdlog::warn("ignoring malformed INTENT_THRESHOLD={}", *v);
        }
    }
    return kDefaultIntentThreshold;
}

ActionResult execute(Runtime& runtime, const ActionDef& action, const MemoryRecord& message,
                     const State& state, const ActionOptions& options) {
    ActionResult result;
    result.action = action.name;
    ReplySink sink;
    try {
        result.success = action.handler(runtime, message, state, options, sink);
        if (!result.success) result.diagnostic = "handler reported failure";
    } catch (const std::exception& e) {
        result.success = false;
        result.diagnostic = e.what();
    } catch (...) {
        result.success = false;
        result.diagnostic = "unknown exception";
    }
    if (!result.success) {
        spdlog::warn("action {} failed: {}", action.name, result.diagnostic);
    }
    result.replies = sink.replies();
    result.extension = sink.extension();
    return result;
}

} // namespace

bool contains_phrase(std::string_view text, std::string_view phrase) {
    return contains_tokens(tokenize(text), tokenize(phrase));
}

std::vector<IntentCandidate> recognize_intent(const Runtime& runtime, std::string_view message_text,
                                              const std::optional<std::string>& model_proposed,
                                              const State& /*state*/) {
    const auto actions = runtime.actions();
    std::map<std::string, std::size_t> order;
    for (std::size_t i = 0; i < actions.size(); ++i) order.emplace(actions[i]->name, i);

    std::map<std::string, IntentCandidate> best;
    auto offer = [&](IntentCandidate c) {
        auto [it, inserted] = best.emplace(c.action, c);
        if (inserted) return;
        auto& cur = it->second;
        if (c.source < cur.source || (c.source == cur.source && c.score > cur.score)) cur = c;
    };

    if (model_proposed) {
        if (const auto* def = runtime.resolve_action(*model_proposed)) {
            offer({def->name, 1.0, IntentSource::Explicit});
        }
    }

    const auto tokens = tokenize(message_text);
    if (!tokens.empty()) {
        for (const auto* def : actions) {
            if (runtime.is_builtin_action(def->name)) continue;
            bool hit = contains_tokens(tokens, tokenize(def->name));
            for (std::size_t i = 0; !hit && i < def->similes.size(); ++i) {
                hit = contains_tokens(tokens, tokenize(def->similes[i]));
            }
            if (hit) offer({def->name, 1.0, IntentSource::Lexical});
        }

        const Embedding query = embed(message_text);
        const double threshold = intent_threshold(runtime);
        for (const auto* def : actions) {
            if (runtime.is_builtin_action(def->name)) continue;
            const Embedding* doc = runtime.action_embedding(def->name);
            if (doc == nullptr) continue;
            const double score = dot(query, *doc);
            if (score >= threshold) offer({def->name, score, IntentSource::Semantic});
        }
    }

    std::vector<IntentCandidate> out;
    out.reserve(best.size());
    for (auto& [name, c] : best) out.push_back(std::move(c));
    std::sort(out.begin(), out.end(), [&](const IntentCandidate& a, const IntentCandidate& b) {
        if (a.source != b.source) return a.source < b.source;
        if (a.score != b.score) return a.score > b.score;
        return order[a.action] < order[b.action];
    });
    return out;
}

ActionResult select_and_execute(Runtime& runtime, const std::vector<IntentCandidate>& candidates,
                                const MemoryRecord& message, const State& state,
                                const ActionOptions& options) {
    for (const auto& c : candidates) {
        const auto* def = runtime.resolve_action(c.action);
        if (def == nullptr) continue;
        bool valid = false;
        try {
            valid = def->validate(runtime, message);
        } catch (const std::exception& e) {
            spdlog::warn("validate of {} threw: {}", def->name, e.what());
        }
        if (valid) return execute(runtime, *def, message, state, options);
    }
    const auto* none = runtime.resolve_action("NONE");
    return execute(runtime, *none, message, state, options);
}

std::vector<ActionDef> builtin_actions() {
    ActionDef none;
    none.name = "NONE";
    none.similes = {"NO_ACTION", "NO_RESPONSE"};
    none.description = "Reply with the message text alone and take no further action.";
    none.validate = [](Runtime&, const MemoryRecord&) { return true; };
    none.handler = [](Runtime&, const MemoryRecord&, const State&, const ActionOptions&, ReplySink&) {
        return true;
    };

    ActionDef ignore;
    ignore.name = "IGNORE";
    ignore.description = "Stay silent: no reply is sent for this message.";
    ignore.validate = [](Runtime&, const MemoryRecord&) { return true; };
    ignore.handler = [](Runtime&, const MemoryRecord&, const State&, const ActionOptions&, ReplySink&) {
        return true;
    };

    ActionDef cont;
    cont.name = "CONTINUE";
    cont.description = "Extend the current reply with one more model completion.";
    cont.validate = [](Runtime&, const MemoryRecord&) { return true; };
    cont.handler = [](Runtime& runtime, const MemoryRecord&, const State& state, const ActionOptions&,
                      ReplySink& sink) {
        auto get = [&](const char* key) {
            auto it = state.extra.find(key);
            return it == state.extra.end() ? std::string() : it->second;
        };
        const std::string prompt = get("prompt") + "\n" + state.agent_name + ": " + get("replyText") +
                                   "\nContinue the reply.\n";
        // The continuation's own ACTION line is dropped: at most one continuation.
        auto parsed = parse_completion(runtime.generate(prompt));
        if (!parsed.text.empty()) sink.extend(parsed.text);
        return true;
    };

    return {std::move(none), std::move(ignore), std::move(cont)};
}

} // namespace agentos
