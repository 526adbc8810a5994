#include "agentos/agents.hpp"

#include <cstdlib>

#include <spdlog/spdlog.h>

#include "agentos/error.hpp"
#include "agentos/media.hpp"
#include "agentos/plugin.hpp"
#include "agentos/social.hpp"

namespace agentos {

namespace {

std::optional<std::string> lookup(const std::map<std::string, std::string>& settings, const std::string& key) {
    if (auto it = settings.find(key); it != settings.end() && !it->second.empty()) return it->second;
    if (const char* env = std::getenv(key.c_str()); env != nullptr && *env != '\0') return std::string(env);
    return std::nullopt;
}

} // namespace

std::vector<std::string> known_plugins() {
    return {"bootstrap", "node", "ledger", "media", "social"};
}

PluginDef make_plugin(const std::string& name, const AgentSetup& setup) {
    if (name == "bootstrap") return bootstrap_plugin();
    if (name == "node") return node_plugin();
    if (name == "ledger") {
        auto ledger = setup.ledger ? setup.ledger : std::make_shared<Ledger>();
        return ledger_plugin(std::move(ledger));
    }
    if (name == "media") return media_plugin(MediaConfig{setup.media_dir});
    if (name == "social") return social_plugin();
    throw Error(ErrorCode::NotFound, "unknown plugin " + name);
}

std::unique_ptr<Runtime> build_agent(const Character& character, const AgentSetup& setup) {
    RuntimeConfig config;
    config.character = character;
    config.settings = setup.settings;
    config.database_adapter_id = setup.adapter;
    if (auto v = lookup(setup.settings, "MIN_TRUST_THRESHOLD")) config.min_trust_threshold = std::stod(*v);
    if (auto v = lookup(setup.settings, "CONVERSATION_LENGTH")) config.conversation_length = std::stoul(*v);
    if (auto v = lookup(setup.settings, "SERVER_URL")) config.server_url = *v;

    auto clock = setup.clock ? setup.clock : std::make_shared<SystemClock>();
    auto runtime = std::make_unique<Runtime>(std::move(config), setup.models, std::move(clock));
    runtime->load_plugin(bootstrap_plugin());
    for (const auto& name : character.plugins) {
        if (name == "bootstrap") continue;
        runtime->load_plugin(make_plugin(name, setup));
    }
    return runtime;
}

std::shared_ptr<ModelRegistry> models_from_settings(const std::map<std::string, std::string>& settings,
                                                    const std::string& http_id) {
    auto models = std::make_shared<ModelRegistry>();
    if (auto path = lookup(settings, "MODEL_SCRIPT")) {
        models->register_provider("scripted", ScriptedProvider::load(*path));
    } else {
        std::vector<ScriptedRule> rules;
        rules.push_back({MatchKind::Default, "", "No script is loaded for this agent.\nACTION: NONE", false});
        models->register_provider("scripted", std::make_shared<ScriptedProvider>(std::move(rules)));
    }
    if (auto url = lookup(settings, "MODEL_HTTP_URL"); url && http_id != "scripted") {
        HttpProviderConfig cfg;
        cfg.url = *url;
        if (auto t = lookup(settings, "MODEL_TIMEOUT_MS")) cfg.timeout = std::chrono::milliseconds(std::stoll(*t));
        if (auto k = lookup(settings, "MODEL_API_KEY")) cfg.api_key = *k;
        models->register_provider(http_id, std::make_shared<HttpProvider>(cfg));
    }
    return models;
}

std::shared_ptr<Ledger> ledger_from_settings(const std::map<std::string, std::string>& settings) {
    std::shared_ptr<Ledger> ledger;
    if (auto path = lookup(settings, "LEDGER_GENESIS")) {
        ledger = Ledger::load_genesis(*path);
    } else {
        ledger = std::make_shared<Ledger>();
    }
    if (auto path = lookup(settings, "LEDGER_FIXTURES")) ledger->load_fixtures(std::filesystem::path(*path));
    return ledger;
}

} // namespace agentos
