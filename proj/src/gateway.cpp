#include "agentos/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "agentos/error.hpp"
#include "agentos/logging.hpp"
#include "agentos/util.hpp"

namespace agentos {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

json violations_json(const std::vector<Violation>& violations) {
    json out = json::array();
    for (const auto& v : violations) out.push_back({{"path", v.path}, {"message", v.message}});
    return out;
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& error, const std::string& message) {
    send_json(res, status, {{"error", error}, {"message", message}});
}

void send_internal(httplib::Response& res, std::string_view what) {
    static std::atomic<std::uint64_t> counter{0};
    const auto id = "err-" + to_hex(stable_hash64(std::string(what) + std::to_string(counter.fetch_add(1))))
                                 .substr(0, 12);
    spdlog::error("request failed [{}]: {}", id, what);
    send_json(res, 500, {{"error", "internal"}, {"id", id}});
}

std::optional<std::size_t> parse_count(const std::string& s) {
    if (s.empty() || s.size() > 9) return std::nullopt;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
    }
    return static_cast<std::size_t>(std::stoul(s));
}

} // namespace

std::variant<MessageRequest, std::vector<Violation>> parse_message_request(std::string_view body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        return std::vector<Violation>{{"", std::string("malformed JSON: ") + e.what()}};
    }
    if (!doc.is_object()) return std::vector<Violation>{{"", "body must be a JSON object"}};

    std::vector<Violation> violations;
    MessageRequest req;
    auto required_text = [&](const char* key, std::string& out) {
        auto it = doc.find(key);
        if (it == doc.end()) {
            violations.push_back({key, "is required"});
        } else if (!it->is_string()) {
            violations.push_back({key, "must be a string"});
        } else if (trim(it->get_ref<const std::string&>()).empty()) {
            violations.push_back({key, "must not be empty"});
        } else {
            out = it->get<std::string>();
        }
    };
    required_text("text", req.text);
    required_text("userId", req.user_id);
    if (auto it = doc.find("roomId"); it != doc.end() && !it->is_null()) {
        if (!it->is_string()) {
            violations.push_back({"roomId", "must be a string"});
        } else if (trim(it->get_ref<const std::string&>()).empty()) {
            violations.push_back({"roomId", "must not be empty"});
        } else {
            req.room_id = it->get<std::string>();
        }
    }
    if (!violations.empty()) {
        std::sort(violations.begin(), violations.end(),
                  [](const Violation& a, const Violation& b) { return a.path < b.path; });
        return violations;
    }
    if (req.room_id.empty()) req.room_id = "web:" + req.user_id;
    return req;
}

HttpGateway::HttpGateway(std::vector<std::shared_ptr<Runtime>> agents, GatewayConfig config)
    : agents_(std::move(agents)), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
    for (const auto& a : agents_) {
        if (!a) throw Error(ErrorCode::InvalidArgument, "null agent");
        if (!a->frozen()) throw Error(ErrorCode::InvalidArgument, "agent " + a->agent_id() + " is not frozen");
    }
    install_routes();
}

HttpGateway::~HttpGateway() {
    stop();
}

std::shared_ptr<Runtime> HttpGateway::find(const std::string& id) const {
    for (const auto& a : agents_) {
        if (a->agent_id() == id) return a;
    }
    return nullptr;
}

void HttpGateway::install_routes() {
    auto& s = *server_;

    s.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}});
    });

    s.Get("/agents", [this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto& a : agents_) out.push_back({{"id", a->agent_id()}, {"name", a->character().name}});
        send_json(res, 200, out);
    });

    s.Post(R"(/agents/([^/]+)/message)", [this](const httplib::Request& req, httplib::Response& res) {
        auto agent = find(req.matches[1]);
        if (!agent) return send_error(res, 404, "not_found", "unknown agent " + req.matches[1].str());
        auto parsed = parse_message_request(req.body);
        if (auto* violations = std::get_if<std::vector<Violation>>(&parsed)) {
            return send_json(res, 400, {{"error", "bad_request"}, {"violations", violations_json(*violations)}});
        }
        const auto& msg = std::get<MessageRequest>(parsed);
        try {
            MemoryRecord incoming;
            incoming.user_id = msg.user_id;
            incoming.room_id = msg.room_id;
            incoming.content.text = msg.text;
            send_json(res, 200, to_json(agent->process_message(std::move(incoming))));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::InvalidArgument) {
                return send_json(res, 400, {{"error", "bad_request"},
                                            {"violations", violations_json({{"", redact_secrets(e.what())}})}});
            }
            send_internal(res, e.what());
        } catch (const std::exception& e) {
            send_internal(res, e.what());
        }
    });

    s.Get(R"(/agents/([^/]+)/memories)", [this](const httplib::Request& req, httplib::Response& res) {
        auto agent = find(req.matches[1]);
        if (!agent) return send_error(res, 404, "not_found", "unknown agent " + req.matches[1].str());
        std::vector<Violation> violations;
        const std::string room = req.get_param_value("roomId");
        if (room.empty()) violations.push_back({"roomId", "is required"});
        std::size_t count = 50;
        if (req.has_param("count")) {
            if (auto c = parse_count(req.get_param_value("count"))) {
                count = *c;
            } else {
                violations.push_back({"count", "must be a non-negative integer"});
            }
        }
        if (!violations.empty()) {
            return send_json(res, 400, {{"error", "bad_request"}, {"violations", violations_json(violations)}});
        }
        try {
            json out = json::array();
            for (const auto& r : agent->memory().room_records(room, count)) out.push_back(to_json(r, false));
            send_json(res, 200, out);
        } catch (const std::exception& e) {
            send_internal(res, e.what());
        }
    });

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            send_internal(res, e.what());
        } catch (...) {
            send_internal(res, "unknown exception");
        }
    });

    std::error_code ec;
    std::filesystem::create_directories(config_.media_dir, ec);
    if (ec || !s.set_mount_point("/media", config_.media_dir.string())) {
        spdlog::warn("media directory {} is not served", config_.media_dir.string());
    }
    // Mounted files answer GET and HEAD only.
    s.set_file_request_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Cache-Control", "no-store");
    });
}

int HttpGateway::start() {
    if (config_.port == 0) {
        port_ = server_->bind_to_any_port(config_.host);
    } else {
        port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
    }
    if (port_ <= 0) throw Error(ErrorCode::HttpFailure, "cannot bind " + config_.host + ":" + std::to_string(config_.port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    spdlog::info("gateway listening on {}:{}", config_.host, port_);
    return port_;
}

void HttpGateway::run() {
    if (!thread_.joinable()) start();
    thread_.join();
}

void HttpGateway::stop() {
    if (server_) server_->stop();
    if (thread_.joinable() && thread_.get_id() != std::this_thread::get_id()) thread_.join();
}

// ---------------------------------------------------------------------------
// Terminal client

int run_chat(Runtime& runtime, std::istream& in, std::ostream& out, const std::string& user_id,
             const std::string& room_id) {
    std::optional<MemoryRecord> last;
    std::string line;
    while (std::getline(in, line)) {
        const auto input = std::string(trim(line));
        if (input.empty()) continue;
        if (input == "/quit") return 0;
        if (input == "/state") {
            if (!last) {
                out << "(no message yet)\n";
            } else {
                out << to_json(runtime.compose_state(*last)).dump(2) << "\n";
            }
            continue;
        }
        MemoryRecord incoming;
        incoming.id = runtime.next_id("msg");
        incoming.user_id = user_id;
        incoming.room_id = room_id;
        incoming.content.text = input;
        try {
            for (const auto& reply : runtime.process_message(incoming)) {
                out << runtime.character().name << ": " << reply.text << "\n";
                for (const auto& a : reply.attachments) out << "  attachment: " << a.url << "\n";
            }
            last = runtime.memory().get(incoming.id);
        } catch (const std::exception& e) {
            out << "error: " << redact_secrets(e.what()) << "\n";
        }
        out.flush();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Config

std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t n = 0;
    for (const auto& raw : split_lines(text)) {
        ++n;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(n) + ": expected key=value");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(n) + ": empty key");
        out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::map<std::string, std::string> merge_settings(
    const std::map<std::string, std::string>& file, const std::map<std::string, std::string>& flags,
    const std::vector<std::string>& env_keys,
    const std::function<std::optional<std::string>(const std::string&)>& env) {
    std::map<std::string, std::string> out = file;
    std::vector<std::string> keys = env_keys;
    for (const auto& [k, v] : file) keys.push_back(k);
    for (const auto& [k, v] : flags) keys.push_back(k);
    for (const auto& k : keys) {
        if (auto v = env(k)) out[k] = *v;
    }
    for (const auto& [k, v] : flags) out[k] = v;
    return out;
}

const std::vector<std::string>& known_setting_keys() {
    static const std::vector<std::string> keys = {
        "SERVER_PORT",     "SERVER_URL",       "MODEL_SCRIPT",      "MODEL_HTTP_URL",   "MODEL_TIMEOUT_MS",
        "MODEL_API_KEY",   "MEMORY_FILE",      "LEDGER_GENESIS",    "LEDGER_FIXTURES",  "INTENT_THRESHOLD",
        "MIN_TRUST_THRESHOLD", "PLACEHOLDER_GEN", "SLIPPAGE",        "TRUST_W_RISK",     "TRUST_W_CONSISTENCY",
        "FALLBACK_TEXT",   "FACT_EXTRACTION_MODEL", "WALLET_SECRET_SALT",
    };
    return keys;
}

} // namespace agentos
