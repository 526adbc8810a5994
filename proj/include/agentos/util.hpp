#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agentos {

// FNV-1a, 64-bit. Stable across platforms and runs.
std::uint64_t stable_hash64(std::string_view data) noexcept;

std::array<std::uint8_t, 32> sha256(std::string_view data);
std::string sha256_hex(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string to_hex(std::uint64_t value);

std::string base64_encode(std::string_view bytes);
// Strict decode of standard (padded) base64. nullopt on any invalid input.
std::optional<std::string> base64_decode(std::string_view text);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

// Lowercases and splits on every non-alphanumeric byte. Empty pieces are dropped.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> split_lines(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// "YYYY-MM-DDTHH:MM:SSZ" at second resolution.
std::string format_iso8601(std::int64_t epoch_ms);
std::optional<std::int64_t> parse_iso8601(std::string_view text);

} // namespace agentos
