#include "agentos/model_provider.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "agentos/error.hpp"
#include "agentos/util.hpp"

namespace agentos {

using nlohmann::json;

// ---------------------------------------------------------------------------
// ScriptedProvider

ScriptedProvider::ScriptedProvider(std::vector<ScriptedRule> rules)
    : rules_(std::move(rules)), consumed_(rules_.size(), false) {
    const auto defaults = std::count_if(rules_.begin(), rules_.end(), [](const ScriptedRule& r) {
        return r.matcher == MatchKind::Default;
    });
    if (defaults > 1) {
        throw Error(ErrorCode::InvalidArgument, "a script may have at most one DEFAULT rule");
    }
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_json(const json& script) {
    const json& rules = script.is_array() ? script : script.at("rules");
    std::vector<ScriptedRule> out;
    for (const auto& r : rules) {
        ScriptedRule rule;
        const auto match = to_lower(r.value("match", "default"));
        if (match == "exact") {
            rule.matcher = MatchKind::Exact;
            rule.pattern = r.contains("prompt") ? sha256_hex(r.at("prompt").get<std::string>())
                                                : r.at("pattern").get<std::string>();
        } else if (match == "contains") {
            rule.matcher = MatchKind::Contains;
            rule.pattern = r.at("pattern").get<std::string>();
        } else if (match == "default") {
            rule.matcher = MatchKind::Default;
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown rule matcher: " + match);
        }
        rule.response = r.at("response").get<std::string>();
        rule.consume_once = r.value("once", false);
        out.push_back(std::move(rule));
    }
    return std::make_shared<ScriptedProvider>(std::move(out));
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return from_json(json::parse(buf.str()));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedJson, path.string() + ": " + e.what());
    }
}

std::string ScriptedProvider::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) throw Error(ErrorCode::InvalidArgument, "prompt must not be empty");
    calls_.fetch_add(1);

    std::lock_guard lock(mutex_);
    auto fire = [this](std::size_t i) {
        if (rules_[i].consume_once) consumed_[i] = true;
        return rules_[i].response;
    };

    std::optional<std::string> digest;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (consumed_[i] || rules_[i].matcher != MatchKind::Exact) continue;
        if (!digest) digest = sha256_hex(request.prompt);
        if (rules_[i].pattern == *digest) return fire(i);
    }
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (consumed_[i] || rules_[i].matcher != MatchKind::Contains) continue;
        if (request.prompt.find(rules_[i].pattern) != std::string::npos) return fire(i);
    }
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (!consumed_[i] && rules_[i].matcher == MatchKind::Default) return fire(i);
    }
    throw Error(ErrorCode::NoRuleMatched, "no scripted rule matches the prompt");
}

// ---------------------------------------------------------------------------
// HttpProvider

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.url, m, url_re)) {
        throw Error(ErrorCode::InvalidArgument, "invalid model URL: " + config_.url);
    }
    if (config_.url.starts_with("https://")) {
        throw Error(ErrorCode::InvalidArgument, "https model URLs need a TLS proxy: " + config_.url);
    }
    origin_ = m[1].str();
    path_ = m[2].matched ? m[2].str() : "/";
}

std::string HttpProvider::request_body(const CompletionRequest& request) {
    nlohmann::ordered_json body;
    body["prompt"] = request.prompt;
    body["max_tokens"] = request.max_tokens;
    try {
        return body.dump();
    } catch (const json::type_error& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("prompt is not valid UTF-8: ") + e.what());
    }
}

std::string HttpProvider::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) throw Error(ErrorCode::InvalidArgument, "prompt must not be empty");
    const std::string body = request_body(request);

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);

    std::string last_error;
    bool timed_out = false;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(config_.backoff * (1 << (attempt - 1)));
        }
        httplib::Client client(origin_);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post(path_, headers, body, "application/json");
        const auto elapsed = std::chrono::steady_clock::now() - started;

        if (!res) {
            timed_out = res.error() == httplib::Error::ConnectionTimeout || elapsed >= config_.timeout;
            last_error = httplib::to_string(res.error());
            spdlog::warn("model request to {} failed (attempt {}): {}", config_.url, attempt + 1,
                         last_error);
            continue;
        }
        timed_out = false;
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            spdlog::warn("model request to {} failed (attempt {}): {}", config_.url, attempt + 1,
                         last_error);
            continue;
        }
        if (res->status != 200) {
            throw Error(ErrorCode::HttpFailure, "HTTP " + std::to_string(res->status));
        }
        try {
            auto reply = json::parse(res->body);
            return reply.at("text").get<std::string>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::HttpFailure, std::string("malformed model response: ") + e.what());
        }
    }
    if (timed_out) throw Error(ErrorCode::Timeout, config_.url);
    throw Error(ErrorCode::HttpFailure, config_.url + ": " + last_error);
}

// ---------------------------------------------------------------------------
// ModelRegistry

void ModelRegistry::register_provider(const std::string& id, std::shared_ptr<ModelProvider> provider) {
    if (id.empty() || !provider) throw Error(ErrorCode::InvalidArgument, "model provider id and instance required");
    std::lock_guard lock(mutex_);
    if (!providers_.emplace(id, std::move(provider)).second) {
        throw Error(ErrorCode::DuplicateModelProvider, id);
    }
}

bool ModelRegistry::contains(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return providers_.contains(id);
}

std::shared_ptr<ModelProvider> ModelRegistry::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = providers_.find(id);
    if (it == providers_.end()) throw Error(ErrorCode::UnknownModelProvider, id);
    return it->second;
}

std::string ModelRegistry::complete(const std::string& id, const CompletionRequest& request) const {
    return get(id)->complete(request);
}

std::vector<std::string> ModelRegistry::ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, p] : providers_) out.push_back(id);
    return out;
}

} // namespace agentos
