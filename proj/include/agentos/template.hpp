#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "agentos/components.hpp"

namespace agentos {

/// Substitutes flat `{{key}}` placeholders from the state's named fields
/// (agentName, bio, recentMessages, providers, memories, actions, actionNames)
/// and then its `extra` map. Unknown keys render as "" and add a warning.
/// Substituted text is never rescanned.
std::string render_template(std::string_view tmpl, const State& state,
                            std::vector<std::string>* warnings = nullptr);

} // namespace agentos
