#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentos/character.hpp"
#include "agentos/clock.hpp"
#include "agentos/components.hpp"
#include "agentos/memory.hpp"
#include "agentos/model_provider.hpp"

namespace agentos {

inline constexpr std::size_t kDefaultConversationLength = 32;
inline constexpr std::size_t kDefaultRetrievalK = 5;
inline constexpr std::string_view kDefaultFallbackText = "I am unable to respond right now.";
inline constexpr std::string_view kKnowledgeRoom = "knowledge";

extern const char* const kDefaultMessageTemplate;

struct RuntimeConfig {
    std::string agent_id; // derived from the character name when empty
    std::string model_provider_id; // falls back to character.model_provider_id
    Character character;
    std::string database_adapter_id = "memory";
    std::size_t conversation_length = kDefaultConversationLength;
    std::string server_url = "http://localhost:7998";
    double min_trust_threshold = 50.0;
    std::map<std::string, std::string> settings;
    std::string message_template = kDefaultMessageTemplate;
    std::size_t retrieval_k = kDefaultRetrievalK;
};

/// Ticket lock per room: callers enter a room's lane strictly in arrival order.
class RoomLanes {
public:
    class Guard {
    public:
        Guard(RoomLanes& lanes, std::string room);
        ~Guard();
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        RoomLanes& lanes_;
        std::string room_;
    };

private:
    struct Lane {
        std::uint64_t next_ticket = 0;
        std::uint64_t serving = 0;
    };
    std::mutex mutex_;
    std::condition_variable cv_;
    std::map<std::string, Lane> lanes_;
};

struct ActionResult {
    std::string action;
    bool success = true;
    std::vector<Content> replies;
    std::string extension;
    std::string diagnostic;
};

/// The agent runtime: owns component registries and the memory store, composes
/// state, and runs the message pipeline.
///
/// Registration happens during setup on one thread. After freeze() the
/// registries are read-only and process_message may be called concurrently;
/// messages of one room are handled strictly in arrival order.
class Runtime {
public:
    /// Throws Error{UnknownModelProvider}, Error{InvalidCharacter} or
    /// Error{AdapterOpenFailure}.
    Runtime(RuntimeConfig config, std::shared_ptr<ModelRegistry> models,
            std::shared_ptr<Clock> clock = std::make_shared<SystemClock>());
    ~Runtime();

    Runtime(const Runtime&) = delete;
    Runtime& operator=(const Runtime&) = delete;

    void register_action(ActionDef action);
    void register_provider(ProviderDef provider);
    void register_evaluator(EvaluatorDef evaluator);
    void register_service(ServiceDef service);
    void register_client(ClientDef client);

    /// All-or-nothing: on any conflict the runtime is left exactly as before and
    /// Error{PluginConflict} names the offending component.
    void load_plugin(const PluginDef& plugin);
    std::vector<PluginSummary> list_plugins() const;

    void freeze() noexcept { frozen_.store(true); }
    bool frozen() const noexcept { return frozen_.load(); }

    /// Resolves an action by name or simile (case-insensitive).
    const ActionDef* resolve_action(std::string_view name) const;
    const Embedding* action_embedding(std::string_view name) const;
    bool is_builtin_action(std::string_view name) const;
    std::vector<const ActionDef*> actions() const;
    const std::vector<ProviderDef>& providers() const noexcept { return registry_.providers; }
    const std::vector<EvaluatorDef>& evaluators() const noexcept { return registry_.evaluators; }

    State compose_state(const MemoryRecord& incoming) const;
    std::vector<AgentReply> process_message(MemoryRecord incoming);

    /// One model completion with the runtime's provider and settings.
    std::string generate(const std::string& prompt);

    void start_services();
    void stop_services();
    /// Starts registered clients whose names appear in the character's clients list.
    void start_clients();
    void stop_clients();
    std::vector<std::string> running_clients() const;

    /// config.settings, then the process environment, then character secrets.
    std::optional<std::string> get_setting(const std::string& key) const;
    double minimum_trust_threshold() const noexcept { return config_.min_trust_threshold; }

    MemoryAdapter& memory() noexcept { return *memory_; }
    const MemoryAdapter& memory() const noexcept { return *memory_; }
    Clock& clock() const noexcept { return *clock_; }
    ModelRegistry& models() const noexcept { return *models_; }
    const RuntimeConfig& config() const noexcept { return config_; }
    const Character& character() const noexcept { return config_.character; }
    const std::string& agent_id() const noexcept { return config_.agent_id; }

    /// Deterministic id: stable for a fixed agent id and call sequence.
    std::string next_id(std::string_view prefix);

    /// Persists `content` as an agent-authored MESSAGE record in `room_id`.
    MemoryRecord remember(const std::string& room_id, Content content,
                          MemoryKind kind = MemoryKind::Message);

    std::string registry_digest() const;
    std::string state_digest() const;

private:
    struct RegisteredAction {
        ActionDef def;
        Embedding embedding;
        bool builtin = false;
    };

    struct Registry {
        std::vector<RegisteredAction> actions;
        std::map<std::string, std::size_t> action_keys; // uppercase name/simile -> index
        std::vector<ProviderDef> providers;
        std::vector<EvaluatorDef> evaluators;
        std::vector<ServiceDef> services;
        std::vector<ClientDef> clients;
        std::vector<PluginSummary> plugins;
    };

    void ensure_mutable() const;
    void add_action(ActionDef action, bool builtin);
    void ingest_knowledge();
    std::vector<AgentReply> fallback_reply(const MemoryRecord& incoming);

    RuntimeConfig config_;
    std::shared_ptr<ModelRegistry> models_;
    std::shared_ptr<Clock> clock_;
    std::unique_ptr<MemoryAdapter> memory_;
    Registry registry_;
    std::atomic<bool> frozen_{false};
    std::atomic<std::uint64_t> id_counter_{0};
    RoomLanes lanes_;

    mutable std::mutex lifecycle_mutex_;
    std::vector<std::pair<std::size_t, ComponentHandle>> running_services_;
    std::vector<std::pair<std::size_t, ComponentHandle>> running_clients_;
};

/// Splits a completion into reply text and the action named on its final
/// `ACTION: <NAME>` line, if any.
struct ParsedCompletion {
    std::string text;
    std::optional<std::string> action;
};
ParsedCompletion parse_completion(std::string_view completion);

} // namespace agentos
