#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "agentos/character.hpp"
#include "agentos/clock.hpp"
#include "agentos/ledger.hpp"
#include "agentos/model_provider.hpp"
#include "agentos/runtime.hpp"

namespace agentos {

/// Shared resources for building agents from character files.
struct AgentSetup {
    std::shared_ptr<ModelRegistry> models;
    std::shared_ptr<Clock> clock;
    std::shared_ptr<Ledger> ledger;
    std::filesystem::path media_dir = std::filesystem::current_path();
    std::map<std::string, std::string> settings;
    std::string adapter = "memory";
};

/// bootstrap, node, ledger, media, social. Throws Error{NotFound} otherwise.
PluginDef make_plugin(const std::string& name, const AgentSetup& setup);
std::vector<std::string> known_plugins();

/// Runtime with the bootstrap plugin plus every plugin the character names.
/// Not frozen.
std::unique_ptr<Runtime> build_agent(const Character& character, const AgentSetup& setup);

/// Model registry from settings: MODEL_SCRIPT (path) registers "scripted";
/// MODEL_HTTP_URL registers an HTTP provider under `http_id` (with
/// MODEL_TIMEOUT_MS and MODEL_API_KEY). Without a script, "scripted" answers
/// every prompt with a fixed line.
std::shared_ptr<ModelRegistry> models_from_settings(const std::map<std::string, std::string>& settings,
                                                    const std::string& http_id);

/// Ledger from LEDGER_GENESIS and LEDGER_FIXTURES when set, else an empty one.
std::shared_ptr<Ledger> ledger_from_settings(const std::map<std::string, std::string>& settings);

} // namespace agentos
