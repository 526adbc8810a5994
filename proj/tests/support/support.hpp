#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentos/agents.hpp"
#include "agentos/character.hpp"
#include "agentos/clock.hpp"
#include "agentos/model_provider.hpp"
#include "agentos/runtime.hpp"

namespace testing {

inline std::filesystem::path source_dir() {
    return AGENTOS_SOURCE_DIR;
}

inline std::filesystem::path fixture(const std::string& name) {
    return source_dir() / "fixtures" / name;
}

inline std::filesystem::path sample_character_path() {
    return source_dir() / "characters" / "sample.character.json";
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    return nlohmann::json::parse(in);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    explicit TempDir(const std::string& tag = "agentos") {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rng() % 100000000000ULL));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline agentos::Character minimal_character(const std::string& name = "Tester") {
    agentos::Character c;
    c.name = name;
    c.model_provider_id = "scripted";
    return c;
}

inline std::shared_ptr<agentos::ModelRegistry> scripted_models(const nlohmann::json& script,
                                                               const std::string& id = "scripted") {
    auto models = std::make_shared<agentos::ModelRegistry>();
    models->register_provider(id, agentos::ScriptedProvider::from_json(script));
    return models;
}

inline nlohmann::json reply_script(const std::string& response) {
    return {{"rules", {{{"match", "default"}, {"response", response}}}}};
}

inline std::unique_ptr<agentos::Runtime> bare_runtime(const nlohmann::json& script,
                                                      agentos::Character character = minimal_character(),
                                                      agentos::Timestamp start = 1'700'000'000'000) {
    agentos::RuntimeConfig cfg;
    cfg.character = std::move(character);
    return std::make_unique<agentos::Runtime>(cfg, scripted_models(script),
                                              std::make_shared<agentos::ManualClock>(start, 1000));
}

inline agentos::MemoryRecord message(const std::string& user, const std::string& room, const std::string& text) {
    agentos::MemoryRecord m;
    m.user_id = user;
    m.room_id = room;
    m.content.text = text;
    return m;
}

inline std::string random_text(std::mt19937_64& rng, std::size_t max_len = 24) {
    static const std::vector<std::string> pieces = {"a", "Z", "7", " ", "_", "-", ":", "\"", "\\", "{{user1}}",
                                                    "\n", "\xc3\xa9", "\xe2\x82\xac", "swap", "ok", "."};
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::string out;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) out += pieces[pick(rng)];
    return out;
}

inline std::vector<std::string> random_list(std::mt19937_64& rng, std::size_t max_items = 4) {
    std::uniform_int_distribution<std::size_t> count(0, max_items);
    std::vector<std::string> out(count(rng));
    for (auto& s : out) s = random_text(rng);
    return out;
}

inline agentos::Character random_character(std::mt19937_64& rng) {
    agentos::Character c;
    c.name = "n" + random_text(rng);
    c.model_provider_id = "p" + random_text(rng, 6);
    c.clients = random_list(rng);
    c.bio = random_list(rng);
    c.lore = random_list(rng);
    c.knowledge = random_list(rng);
    c.post_examples = random_list(rng);
    c.topics = random_list(rng);
    c.adjectives = random_list(rng);
    c.plugins = random_list(rng);
    c.style = {random_list(rng), random_list(rng), random_list(rng)};
    std::uniform_int_distribution<int> small(0, 3);
    for (int d = small(rng); d > 0; --d) {
        std::vector<agentos::MessageExample> dialogue;
        for (int m = small(rng); m > 0; --m) dialogue.push_back({random_text(rng), random_text(rng)});
        c.message_examples.push_back(std::move(dialogue));
    }
    for (int k = small(rng); k > 0; --k) c.settings.secrets["KEY_" + std::to_string(k)] = random_text(rng);
    if (small(rng) == 0) c.settings.voice = random_text(rng);
    if (small(rng) == 0) c.extra["customField"] = {{"nested", random_text(rng)}};
    return c;
}

// Independent reference implementations used as oracles.
namespace oracle {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::vector<std::string> words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::vector<double> embed(const std::string& text, std::size_t dim = 128) {
    std::vector<double> v(dim, 0.0);
    for (const auto& w : words(text)) {
        const auto h = fnv1a(w);
        v[h % dim] += ((h / dim) & 1) ? -1.0 : 1.0;
    }
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0) {
        for (auto& x : v) x /= n;
    }
    return v;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace oracle

} // namespace testing
