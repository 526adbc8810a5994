#include "agentos/plugin.hpp"

#include <spdlog/spdlog.h>

#include "agentos/error.hpp"
#include "agentos/evaluators.hpp"
#include "agentos/providers.hpp"
#include "agentos/runtime.hpp"
#include "agentos/util.hpp"

namespace agentos {

void Runtime::load_plugin(const PluginDef& plugin) {
    ensure_mutable();
    if (trim(plugin.name).empty()) throw Error(ErrorCode::InvalidArgument, "plugin name must not be empty");
    for (const auto& p : registry_.plugins) {
        if (p.name == plugin.name) throw Error(ErrorCode::PluginConflict, "plugin " + plugin.name);
    }

    Registry snapshot = registry_;
    std::string component;
    try {
        for (const auto& a : plugin.actions) {
            component = "action " + a.name;
            register_action(a);
        }
        for (const auto& p : plugin.providers) {
            component = "provider " + p.name;
            register_provider(p);
        }
        for (const auto& e : plugin.evaluators) {
            component = "evaluator " + e.name;
            register_evaluator(e);
        }
        for (const auto& s : plugin.services) {
            component = "service " + s.name;
            register_service(s);
        }
        for (const auto& c : plugin.clients) {
            component = "client " + c.name;
            register_client(c);
        }
    } catch (const Error& e) {
        registry_ = std::move(snapshot);
        throw Error(ErrorCode::PluginConflict, plugin.name + ": " + component + " (" + e.what() + ")");
    }

    registry_.plugins.push_back({plugin.name, plugin.description, plugin.actions.size(),
                                 plugin.providers.size(), plugin.evaluators.size(),
                                 plugin.services.size(), plugin.clients.size()});
    spdlog::debug("loaded plugin {}", plugin.name);
}

std::vector<PluginSummary> Runtime::list_plugins() const {
    return registry_.plugins;
}

PluginDef bootstrap_plugin() {
    PluginDef p;
    p.name = "bootstrap";
    p.description = "Time, facts and engagement context with fact and goal tracking.";
    p.providers = {time_provider(), facts_provider(), boredom_provider()};
    p.evaluators = {fact_evaluator(), goal_evaluator()};
    return p;
}

namespace {

struct StubService {
    std::string name;
    bool running = true;
};

ServiceDef stub_service(std::string name) {
    ServiceDef s;
    s.name = name;
    s.start = [name](Runtime&) -> ComponentHandle {
        spdlog::debug("service {} started ({})", name, kUnimplemented);
        return std::make_shared<StubService>(StubService{name});
    };
    s.stop = [](ComponentHandle& handle) {
        if (auto* stub = static_cast<StubService*>(handle.get())) stub->running = false;
    };
    return s;
}

} // namespace

PluginDef node_plugin() {
    PluginDef p;
    p.name = "node";
    p.description = "Service stubs: browser, image description, speech, transcription, video, pdf, storage.";
    for (const char* name : {"browser", "image_description", "speech", "transcription", "video", "pdf", "storage"}) {
        p.services.push_back(stub_service(name));
    }
    return p;
}

} // namespace agentos
