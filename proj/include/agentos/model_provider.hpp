#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentos {

struct CompletionRequest {
    std::string prompt;
    int max_tokens = 512;
    double temperature = 0.0;
    std::vector<std::string> stop;
    std::optional<std::int64_t> seed;
};

class ModelProvider {
public:
    virtual ~ModelProvider() = default;

    /// Throws Error on failure (NoRuleMatched, HttpFailure, Timeout, ...).
    virtual std::string complete(const CompletionRequest& request) = 0;
};

enum class MatchKind { Exact, Contains, Default };

struct ScriptedRule {
    MatchKind matcher = MatchKind::Default;
    // Exact: SHA-256 hex digest of the prompt. Contains: substring. Default: unused.
    std::string pattern;
    std::string response;
    bool consume_once = false;
};

/// Deterministic rule playback. Lookup order: the first live Exact rule, then
/// the first live Contains rule (registration order), then Default. A
/// consume_once rule goes dead after it fires. Temperature and seed are ignored.
class ScriptedProvider final : public ModelProvider {
public:
    explicit ScriptedProvider(std::vector<ScriptedRule> rules);

    /// {"rules": [{"match": "contains", "pattern": "...", "response": "...", "once": true}, ...]}
    /// An exact rule may give "prompt" instead of "pattern"; its digest is taken.
    static std::shared_ptr<ScriptedProvider> from_json(const nlohmann::json& script);
    static std::shared_ptr<ScriptedProvider> load(const std::filesystem::path& path);

    std::string complete(const CompletionRequest& request) override;

    std::size_t calls() const noexcept { return calls_.load(); }

private:
    std::mutex mutex_;
    std::vector<ScriptedRule> rules_;
    std::vector<bool> consumed_;
    std::atomic<std::size_t> calls_{0};
};

struct HttpProviderConfig {
    std::string url; // e.g. http://127.0.0.1:8080/v1/complete
    std::chrono::milliseconds timeout{30000};
    std::string api_key;
    int retries = 2;
    std::chrono::milliseconds backoff{100};
};

/// POSTs {"prompt": ..., "max_tokens": ...} and returns the `text` field of the
/// JSON response. Transport errors and 5xx responses are retried with
/// exponential backoff.
class HttpProvider final : public ModelProvider {
public:
    explicit HttpProvider(HttpProviderConfig config);

    std::string complete(const CompletionRequest& request) override;

    static std::string request_body(const CompletionRequest& request);

private:
    HttpProviderConfig config_;
    std::string origin_;
    std::string path_;
};

class ModelRegistry {
public:
    void register_provider(const std::string& id, std::shared_ptr<ModelProvider> provider);
    bool contains(const std::string& id) const;
    /// Throws Error{UnknownModelProvider}.
    std::shared_ptr<ModelProvider> get(const std::string& id) const;
    std::string complete(const std::string& id, const CompletionRequest& request) const;
    std::vector<std::string> ids() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<ModelProvider>> providers_;
};

} // namespace agentos
