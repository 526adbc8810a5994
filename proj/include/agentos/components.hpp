#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentos/memory.hpp"

namespace agentos {

class Runtime;

/// Context composed for one incoming message.
struct State {
    std::string agent_name;
    std::string bio_excerpt;
    std::vector<MemoryRecord> recent_messages; // ascending created_at
    std::vector<std::pair<std::string, std::string>> provider_outputs; // registration order
    std::vector<ScoredMemory> retrieved_memories;
    std::vector<std::pair<std::string, std::string>> available_actions;
    std::map<std::string, std::string> extra;
};

nlohmann::json to_json(const State& state);

struct AgentReply {
    std::string text;
    std::optional<std::string> action;
    std::vector<Attachment> attachments;

    bool operator==(const AgentReply&) const = default;
};

nlohmann::json to_json(const AgentReply& reply);
nlohmann::json to_json(const std::vector<AgentReply>& replies);

/// Collects what an action handler says back. `reply` emits a separate reply;
/// `extend` appends text to the primary (model-written) reply.
class ReplySink {
public:
    void reply(Content content) { replies_.push_back(std::move(content)); }
    void extend(std::string text) { extension_ += text; }

    const std::vector<Content>& replies() const noexcept { return replies_; }
    const std::string& extension() const noexcept { return extension_; }

private:
    std::vector<Content> replies_;
    std::string extension_;
};

using ActionOptions = std::map<std::string, std::string>;

struct ActionDef {
    std::string name;
    std::vector<std::string> similes;
    std::string description;
    std::function<bool(Runtime&, const MemoryRecord&)> validate;
    std::function<bool(Runtime&, const MemoryRecord&, const State&, const ActionOptions&, ReplySink&)>
        handler;
};

/// Providers observe; they must not write to any store.
struct ProviderDef {
    std::string name;
    std::function<std::string(const Runtime&, const MemoryRecord&, const State&)> get;
};

enum class OutcomeKind { Fact, GoalUpdate, Reflection };

struct EvaluationOutcome {
    OutcomeKind kind = OutcomeKind::Fact;
    std::string text; // FACT / REFLECTION payload
    std::string goal_id;
    std::size_t objective_index = 0;
    bool completed = true;

    bool operator==(const EvaluationOutcome&) const = default;
};

struct EvaluatorDef {
    std::string name;
    std::string description;
    std::function<bool(const MemoryRecord&, const State&)> should_run;
    std::function<std::vector<EvaluationOutcome>(Runtime&, const MemoryRecord&,
                                                 std::span<const MemoryRecord>)>
        run;
};

using ComponentHandle = std::shared_ptr<void>;

struct ServiceDef {
    std::string name;
    std::function<ComponentHandle(Runtime&)> start;
    std::function<void(ComponentHandle&)> stop;
};

struct ClientDef {
    std::string name;
    std::function<ComponentHandle(Runtime&)> start;
    std::function<void(ComponentHandle&)> stop;
};

struct PluginDef {
    std::string name;
    std::string description;
    std::vector<ActionDef> actions;
    std::vector<ProviderDef> providers;
    std::vector<EvaluatorDef> evaluators;
    std::vector<ServiceDef> services;
    std::vector<ClientDef> clients;
};

struct PluginSummary {
    std::string name;
    std::string description;
    std::size_t actions = 0;
    std::size_t providers = 0;
    std::size_t evaluators = 0;
    std::size_t services = 0;
    std::size_t clients = 0;

    bool operator==(const PluginSummary&) const = default;
};

} // namespace agentos
