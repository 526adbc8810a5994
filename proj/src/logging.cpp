#include "agentos/logging.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include <spdlog/pattern_formatter.h>
#include <spdlog/spdlog.h>

namespace agentos {

namespace {

struct LongestFirst {
    bool operator()(const std::string& a, const std::string& b) const {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    }
};

std::mutex g_mutex;
std::set<std::string, LongestFirst> g_secrets;

class RedactingFormatter final : public spdlog::formatter {
public:
    RedactingFormatter() : inner_(std::make_unique<spdlog::pattern_formatter>()) {}

    void format(const spdlog::details::log_msg& msg, spdlog::memory_buf_t& dest) override {
        spdlog::memory_buf_t raw;
        inner_->format(msg, raw);
        const auto clean = redact_secrets(std::string_view(raw.data(), raw.size()));
        dest.append(clean.data(), clean.data() + clean.size());
    }

    std::unique_ptr<spdlog::formatter> clone() const override {
        return std::make_unique<RedactingFormatter>();
    }

private:
    std::unique_ptr<spdlog::formatter> inner_;
};

} // namespace

void register_secret(std::string value) {
    if (value.empty()) return;
    std::lock_guard lock(g_mutex);
    g_secrets.insert(std::move(value));
}

void clear_secrets() {
    std::lock_guard lock(g_mutex);
    g_secrets.clear();
}

std::string redact_secrets(std::string_view text) {
    std::string out(text);
    std::lock_guard lock(g_mutex);
    for (const auto& secret : g_secrets) {
        std::size_t pos = 0;
        while ((pos = out.find(secret, pos)) != std::string::npos) {
            out.replace(pos, secret.size(), kRedacted);
            pos += kRedacted.size();
        }
    }
    return out;
}

void install_log_redaction() {
    spdlog::default_logger()->set_formatter(std::make_unique<RedactingFormatter>());
}

} // namespace agentos
