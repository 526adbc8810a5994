#include "agentos/template.hpp"

#include <spdlog/spdlog.h>

#include "agentos/util.hpp"

namespace agentos {

namespace {

std::string format_recent(const State& state) {
    std::string agent_id;
    if (auto it = state.extra.find("agentId"); it != state.extra.end()) agent_id = it->second;
    std::vector<std::string> lines;
    for (const auto& r : state.recent_messages) {
        const std::string& who = (!agent_id.empty() && r.user_id == agent_id) ? state.agent_name : r.user_id;
        std::string line = who + ": " + r.content.text;
        if (r.content.action && *r.content.action != "NONE") line += " (" + *r.content.action + ")";
        lines.push_back(std::move(line));
    }
    return join(lines, "\n");
}

std::string format_providers(const State& state) {
    std::vector<std::string> parts;
    for (const auto& [name, text] : state.provider_outputs) {
        if (!text.empty()) parts.push_back(text);
    }
    return join(parts, "\n");
}

std::string format_memories(const State& state) {
    std::vector<std::string> lines;
    for (const auto& m : state.retrieved_memories) lines.push_back("- " + m.record.content.text);
    return join(lines, "\n");
}

std::string format_actions(const State& state) {
    std::vector<std::string> lines;
    for (const auto& [name, description] : state.available_actions) {
        lines.push_back(name + ": " + description);
    }
    return join(lines, "\n");
}

std::string format_action_names(const State& state) {
    std::vector<std::string> names;
    for (const auto& [name, description] : state.available_actions) names.push_back(name);
    return join(names, ", ");
}

std::optional<std::string> lookup(std::string_view key, const State& state) {
    if (key == "agentName") return state.agent_name;
    if (key == "bio") return state.bio_excerpt;
    if (key == "recentMessages") return format_recent(state);
    if (key == "providers") return format_providers(state);
    if (key == "memories") return format_memories(state);
    if (key == "actions") return format_actions(state);
    if (key == "actionNames") return format_action_names(state);
    if (auto it = state.extra.find(std::string(key)); it != state.extra.end()) return it->second;
    return std::nullopt;
}

} // namespace

std::string render_template(std::string_view tmpl, const State& state,
                            std::vector<std::string>* warnings) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        const auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        out.append(tmpl.substr(pos, open - pos));
        const auto key = trim(tmpl.substr(open + 2, close - open - 2));
        if (auto value = lookup(key, state)) {
            out.append(*value);
        } else {
            std::string msg = "unknown template key: " + std::string(key);
            spdlog::warn("{}", msg);
            if (warnings) warnings->push_back(std::move(msg));
        }
        pos = close + 2;
    }
    return out;
}

} // namespace agentos
