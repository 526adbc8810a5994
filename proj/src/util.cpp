#include "agentos/util.hpp"

#include <sodium.h>

#include <cctype>
#include <ctime>
#include <stdexcept>

#include "agentos/error.hpp"

namespace agentos {

namespace {

void ensure_sodium() {
    static const bool ready = sodium_init() >= 0;
    if (!ready) {
        throw std::runtime_error("libsodium initialisation failed");
    }
}

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

} // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownModelProvider: return "UnknownModelProvider";
        case ErrorCode::DuplicateModelProvider: return "DuplicateModelProvider";
        case ErrorCode::InvalidCharacter: return "InvalidCharacter";
        case ErrorCode::AdapterOpenFailure: return "AdapterOpenFailure";
        case ErrorCode::AdapterWriteFailure: return "AdapterWriteFailure";
        case ErrorCode::DuplicateActionName: return "DuplicateActionName";
        case ErrorCode::DuplicateProviderName: return "DuplicateProviderName";
        case ErrorCode::DuplicateEvaluatorName: return "DuplicateEvaluatorName";
        case ErrorCode::DuplicateComponentName: return "DuplicateComponentName";
        case ErrorCode::RuntimeFrozen: return "RuntimeFrozen";
        case ErrorCode::PluginConflict: return "PluginConflict";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::MalformedJson: return "MalformedJson";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::ObjectiveIndexError: return "ObjectiveIndexError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NoRuleMatched: return "NoRuleMatched";
        case ErrorCode::HttpFailure: return "HttpFailure";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::ModelProviderFailure: return "ModelProviderFailure";
        case ErrorCode::InsufficientFunds: return "InsufficientFunds";
        case ErrorCode::UnknownWallet: return "UnknownWallet";
        case ErrorCode::UnknownPool: return "UnknownPool";
        case ErrorCode::UnknownToken: return "UnknownToken";
        case ErrorCode::SlippageExceeded: return "SlippageExceeded";
        case ErrorCode::InvalidBase64: return "InvalidBase64";
        case ErrorCode::WriteFailure: return "WriteFailure";
        case ErrorCode::NoProviderConfigured: return "NoProviderConfigured";
        case ErrorCode::EmptySwarm: return "EmptySwarm";
        case ErrorCode::EmptyInput: return "EmptyInput";
    }
    return "Unknown";
}

std::uint64_t stable_hash64(std::string_view data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::array<std::uint8_t, 32> sha256(std::string_view data) {
    ensure_sodium();
    std::array<std::uint8_t, 32> out{};
    crypto_hash_sha256(out.data(), reinterpret_cast<const unsigned char*>(data.data()),
                       data.size());
    return out;
}

std::string sha256_hex(std::string_view data) {
    auto digest = sha256(data);
    return to_hex(digest);
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

std::string to_hex(std::uint64_t value) {
    std::array<std::uint8_t, 8> bytes{};
    for (int i = 7; i >= 0; --i) {
        bytes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 0xff);
        value >>= 8;
    }
    return to_hex(bytes);
}

std::string base64_encode(std::string_view bytes) {
    ensure_sodium();
    const auto variant = sodium_base64_VARIANT_ORIGINAL;
    std::string out(sodium_base64_encoded_len(bytes.size(), variant), '\0');
    sodium_bin2base64(out.data(), out.size(),
                      reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), variant);
    out.resize(out.size() - 1); // drop the terminating NUL
    return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
    ensure_sodium();
    std::string out(text.size() / 4 * 3 + 3, '\0');
    std::size_t written = 0;
    const char* end = nullptr;
    if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(), text.data(),
                          text.size(), nullptr, &written, &end,
                          sodium_base64_VARIANT_ORIGINAL) != 0) {
        return std::nullopt;
    }
    if (end != text.data() + text.size()) {
        return std::nullopt;
    }
    out.resize(written);
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : trim(s)) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_alnum(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        auto line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = pos + 1;
    }
    return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::string format_iso8601(std::int64_t epoch_ms) {
    std::int64_t secs = epoch_ms / 1000;
    if (epoch_ms < 0 && epoch_ms % 1000 != 0) --secs;
    std::time_t t = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    std::tm tm{};
    std::string s(text);
    const char* end = strptime(s.c_str(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    if (end == nullptr || *end != '\0') return std::nullopt;
    return static_cast<std::int64_t>(timegm(&tm)) * 1000;
}

} // namespace agentos
