#pragma once

#include <cstddef>
#include <string>

#include "agentos/components.hpp"

namespace agentos {

inline constexpr std::size_t kFactsProviderLimit = 5;

ProviderDef time_provider();
ProviderDef facts_provider();
ProviderDef boredom_provider();

/// clamp(0.25 * trailing agent messages, 0, 1) over `recent`, skipping
/// `exclude_id` (the message being answered).
double boredom_level(const std::vector<MemoryRecord>& recent, const std::string& agent_id,
                     const std::string& exclude_id = {});
std::string engagement_label(double boredom);

} // namespace agentos
