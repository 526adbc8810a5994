// Command-line entry point: start, chat, validate, bench.

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "agentos/agents.hpp"
#include "agentos/bench.hpp"
#include "agentos/error.hpp"
#include "agentos/gateway.hpp"
#include "agentos/logging.hpp"

using namespace agentos;

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) {
    g_stop = 1;
}

std::optional<std::string> env_lookup(const std::string& key) {
    if (const char* v = std::getenv(key.c_str())) return std::string(v);
    return std::nullopt;
}

std::map<std::string, std::string> settings_for(const std::string& config_path,
                                                std::map<std::string, std::string> flags) {
    std::map<std::string, std::string> file;
    if (!config_path.empty()) file = load_config(config_path);
    return merge_settings(file, flags, known_setting_keys(), env_lookup);
}

int cmd_validate(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cout << path << ": file not found\n";
        return 1;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        std::cout << path << ": malformed JSON: " << e.what() << "\n";
        return 1;
    }
    const auto violations = validate_character(doc);
    for (const auto& v : violations) std::cout << (v.path.empty() ? "<root>" : v.path) << ": " << v.message << "\n";
    if (violations.empty()) std::cout << path << ": ok\n";
    return violations.empty() ? 0 : 1;
}

std::shared_ptr<Runtime> make_runtime(const std::string& character_path,
                                      const std::map<std::string, std::string>& settings,
                                      const std::shared_ptr<Ledger>& ledger) {
    const auto character = load_character(character_path);
    AgentSetup setup;
    setup.settings = settings;
    setup.models = models_from_settings(settings, character.model_provider_id);
    setup.ledger = ledger;
    setup.media_dir = std::filesystem::current_path();
    if (settings.contains("MEMORY_FILE")) setup.adapter = "file";
    auto runtime = std::shared_ptr<Runtime>(build_agent(character, setup));
    runtime->freeze();
    return runtime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"agentos: agent runtime, gateway and bench"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value settings file");
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error");

    auto* start = app.add_subcommand("start", "serve characters over HTTP");
    std::vector<std::string> start_characters;
    int port = 0;
    std::string script;
    start->add_option("--character", start_characters, "character file")->required();
    start->add_option("--port", port, "listen port");
    start->add_option("--script", script, "scripted provider rules");

    auto* chat = app.add_subcommand("chat", "terminal chat");
    std::string chat_character;
    chat->add_option("--character", chat_character, "character file")->required();
    chat->add_option("--script", script, "scripted provider rules");

    auto* validate = app.add_subcommand("validate", "check a character file");
    std::string validate_character_path;
    validate->add_option("--character", validate_character_path, "character file")->required();

    auto* bench = app.add_subcommand("bench", "run a benchmark suite");
    std::string suite = "basic";
    std::string bench_character;
    std::string report_path;
    std::string genesis = "fixtures/genesis.json";
    std::string fixtures = "fixtures/ledger_fixtures.json";
    std::string bench_script = "fixtures/bench.script.json";
    bench->add_option("--suite", suite, "suite name")->check(CLI::IsMember({"basic"}));
    bench->add_option("--character", bench_character, "character file")->required();
    bench->add_option("--report", report_path, "report output path")->required();
    bench->add_option("--script", bench_script, "scripted provider rules");
    bench->add_option("--genesis", genesis, "ledger genesis");
    bench->add_option("--fixtures", fixtures, "token and recommender fixtures");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(log_level));
    install_log_redaction();

    try {
        if (*validate) return cmd_validate(validate_character_path);

        std::map<std::string, std::string> flags;
        if (!script.empty()) flags["MODEL_SCRIPT"] = script;
        if (port != 0) flags["SERVER_PORT"] = std::to_string(port);

        if (*bench) {
            auto cfg = load_bench_config(bench_character, bench_script, genesis, fixtures);
            cfg.settings = settings_for(config_path, flags);
            const auto report = run_basic_suite(cfg);
            std::ofstream out(report_path);
            if (!out) throw Error(ErrorCode::WriteFailure, report_path);
            out << report.to_json().dump(2) << "\n";
            std::cout << report.canonical_digest() << "\n";
            return report.passed == static_cast<int>(report.tasks.size()) ? 0 : 1;
        }

        const auto settings = settings_for(config_path, flags);
        auto ledger = ledger_from_settings(settings);

        if (*chat) {
            auto runtime = make_runtime(chat_character, settings, ledger);
            runtime->start_services();
            runtime->start_clients();
            return run_chat(*runtime, std::cin, std::cout);
        }

        if (*start) {
            std::vector<std::shared_ptr<Runtime>> agents;
            for (const auto& path : start_characters) agents.push_back(make_runtime(path, settings, ledger));
            GatewayConfig gw;
            if (auto it = settings.find("SERVER_PORT"); it != settings.end()) gw.port = std::stoi(it->second);
            for (auto& a : agents) {
                a->start_services();
                a->start_clients();
            }
            HttpGateway gateway(agents, gw);
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            gateway.start();
            std::cout << "listening on " << gw.host << ":" << gateway.port() << std::endl;
            while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            gateway.stop();
            for (auto it = agents.rbegin(); it != agents.rend(); ++it) {
                (*it)->stop_clients();
                (*it)->stop_services();
                (*it)->memory().flush();
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << redact_secrets(e.what()) << "\n";
        return 2;
    }
    return 0;
}
