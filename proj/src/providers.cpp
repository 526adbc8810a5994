#include "agentos/providers.hpp"

#include <algorithm>
#include <limits>

#include "agentos/runtime.hpp"
#include "agentos/util.hpp"

namespace agentos {

double boredom_level(const std::vector<MemoryRecord>& recent, const std::string& agent_id,
                     const std::string& exclude_id) {
    int trailing = 0;
    for (auto it = recent.rbegin(); it != recent.rend(); ++it) {
        if (!exclude_id.empty() && it->id == exclude_id) continue;
        if (it->user_id != agent_id) break;
        ++trailing;
    }
    return std::clamp(0.25 * trailing, 0.0, 1.0);
}

std::string engagement_label(double boredom) {
    if (boredom < 0.25) return "engaged";
    if (boredom < 0.75) return "neutral";
    return "bored";
}

ProviderDef time_provider() {
    return {"time", [](const Runtime& runtime, const MemoryRecord&, const State&) {
                return "Current time: " + format_iso8601(runtime.clock().now());
            }};
}

ProviderDef facts_provider() {
    return {"facts", [](const Runtime& runtime, const MemoryRecord& message, const State&) {
                const Embedding query =
                    message.embedding.empty() ? embed(message.content.text) : message.embedding;
                std::vector<MemoryRecord> facts;
                if (l2_norm(query) > 0.0) {
                    MemoryFilter filter;
                    filter.room_id = message.room_id;
                    filter.kind = MemoryKind::Fact;
                    for (auto& hit : runtime.memory().search_similar(
                             query, kFactsProviderLimit, -std::numeric_limits<double>::infinity(), filter)) {
                        facts.push_back(std::move(hit.record));
                    }
                } else {
                    facts = runtime.memory().room_records(message.room_id, kFactsProviderLimit, MemoryKind::Fact);
                }
                std::vector<std::string> lines;
                for (const auto& f : facts) lines.push_back("Known fact: " + f.content.text);
                return join(lines, "\n");
            }};
}

ProviderDef boredom_provider() {
    return {"boredom", [](const Runtime& runtime, const MemoryRecord& message, const State& state) {
                const double b = boredom_level(state.recent_messages, runtime.agent_id(), message.id);
                return "Engagement: " + engagement_label(b);
            }};
}

} // namespace agentos
