#pragma once

#include <string>

#include "agentos/components.hpp"

namespace agentos {

inline constexpr const char* kSocialRoom = "social";
inline constexpr const char* kSocialClient = "social";

/// Simulated social platform: a "social" client and a SOCIAL_POST action that
/// publishes into the "social" room while the client runs.
PluginDef social_plugin();

/// The text a SOCIAL_POST publishes: what follows the last ':' if anything
/// does, otherwise the whole message.
std::string extract_post_text(std::string_view message);

} // namespace agentos
