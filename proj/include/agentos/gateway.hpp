#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentos/character.hpp"
#include "agentos/runtime.hpp"

namespace httplib {
class Server;
}

namespace agentos {

inline constexpr int kDefaultPort = 7998;

struct GatewayConfig {
    std::string host = "127.0.0.1";
    int port = kDefaultPort; // 0 picks a free port
    std::filesystem::path media_dir = std::filesystem::current_path() / "generatedImages";
};

/// Result of checking a POST /agents/{id}/message body.
struct MessageRequest {
    std::string user_id;
    std::string room_id;
    std::string text;
};
/// Returns the request or the violations that make it malformed.
std::variant<MessageRequest, std::vector<Violation>> parse_message_request(std::string_view body);

/// HTTP front end over one or more frozen runtimes.
class HttpGateway {
public:
    HttpGateway(std::vector<std::shared_ptr<Runtime>> agents, GatewayConfig config = {});
    ~HttpGateway();

    HttpGateway(const HttpGateway&) = delete;
    HttpGateway& operator=(const HttpGateway&) = delete;

    /// Binds and serves on a background thread. Returns the bound port.
    int start();
    /// Blocks serving on the calling thread until stop() is called elsewhere.
    void run();
    void stop();
    int port() const noexcept { return port_; }

private:
    void install_routes();
    std::shared_ptr<Runtime> find(const std::string& id) const;

    std::vector<std::shared_ptr<Runtime>> agents_;
    GatewayConfig config_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

/// Line loop: each line goes to process_message; replies print as
/// "<agent>: <text>" plus one "  attachment: <url>" line per attachment.
/// "/quit" ends the loop, "/state" prints the state composed for the last
/// message. Returns the exit code.
int run_chat(Runtime& runtime, std::istream& in, std::ostream& out, const std::string& user_id = "user",
             const std::string& room_id = "terminal");

/// Flat key=value lines; '#' starts a comment line; whitespace around keys and
/// values is trimmed. Throws Error{FileNotFound} or Error{InvalidArgument}.
std::map<std::string, std::string> parse_config(std::string_view text);
std::map<std::string, std::string> load_config(const std::filesystem::path& path);

/// Config file < process environment < flags, per key. Environment values are
/// consulted for every key named in the file or flags, and for `env_keys`.
std::map<std::string, std::string> merge_settings(
    const std::map<std::string, std::string>& file, const std::map<std::string, std::string>& flags,
    const std::vector<std::string>& env_keys,
    const std::function<std::optional<std::string>(const std::string&)>& env);

/// Keys the CLI reads from the environment.
const std::vector<std::string>& known_setting_keys();

} // namespace agentos
