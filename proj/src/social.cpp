#include "agentos/social.hpp"

#include <algorithm>

#include "agentos/error.hpp"
#include "agentos/runtime.hpp"
#include "agentos/util.hpp"

namespace agentos {

namespace {

struct SocialSession {
    std::string agent_id;
    bool connected = true;
};

} // namespace

std::string extract_post_text(std::string_view message) {
    const auto colon = message.rfind(':');
    if (colon != std::string_view::npos) {
        auto tail = trim(message.substr(colon + 1));
        if (!tail.empty()) return std::string(tail);
    }
    return std::string(trim(message));
}

PluginDef social_plugin() {
    ClientDef client;
    client.name = kSocialClient;
    client.start = [](Runtime& runtime) -> ComponentHandle {
        return std::make_shared<SocialSession>(SocialSession{runtime.agent_id()});
    };
    client.stop = [](ComponentHandle& handle) {
        if (auto* s = static_cast<SocialSession*>(handle.get())) s->connected = false;
    };

    ActionDef post;
    post.name = "SOCIAL_POST";
    post.similes = {"POST_TO_SOCIAL", "SHARE_POST"};
    post.description = "Publish a short post on the social timeline.";
    post.handler = [](Runtime& runtime, const MemoryRecord& message, const State&, const ActionOptions&,
                      ReplySink& sink) {
        const auto running = runtime.running_clients();
        if (std::find(running.begin(), running.end(), kSocialClient) == running.end()) {
            throw Error(ErrorCode::InvalidArgument, "social client is not running");
        }
        const auto text = extract_post_text(message.content.text);
        runtime.remember(kSocialRoom, Content{text, std::string("SOCIAL_POST"), {}});
        Content reply;
        reply.text = "Posted to social: " + text;
        sink.reply(std::move(reply));
        return true;
    };

    PluginDef p;
    p.name = "social";
    p.description = "Simulated social timeline client.";
    p.actions.push_back(std::move(post));
    p.clients.push_back(std::move(client));
    return p;
}

} // namespace agentos
