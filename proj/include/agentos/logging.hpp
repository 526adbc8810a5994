#pragma once

#include <string>
#include <string_view>

namespace agentos {

inline constexpr std::string_view kRedacted = "[REDACTED]";

/// Adds a value that must never appear in a log line. Empty values are ignored.
void register_secret(std::string value);
void clear_secrets();

/// Replaces every registered value in `text` with "[REDACTED]", longest first.
std::string redact_secrets(std::string_view text);

/// Puts a redacting formatter on the default logger and its sinks. Safe to call
/// repeatedly; sinks added later need another call.
void install_log_redaction();

} // namespace agentos
