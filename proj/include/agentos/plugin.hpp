#pragma once

#include <string>
#include <vector>

#include "agentos/components.hpp"

namespace agentos {

/// Time, facts and boredom providers with the fact and goal evaluators.
PluginDef bootstrap_plugin();

/// Service stubs for browsing, speech, transcription and the like. They start
/// and stop, and report "unimplemented" when used.
PluginDef node_plugin();

/// Message returned by stub services.
inline constexpr const char* kUnimplemented = "unimplemented";

} // namespace agentos
