#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentos/character.hpp"
#include "agentos/runtime.hpp"

namespace agentos {

struct BenchTaskResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string diagnostic;
    double wall_ms = 0.0;
};

struct BenchReport {
    std::string suite;
    std::string tier;
    std::string character;
    std::string provider;
    std::vector<BenchTaskResult> tasks;
    int passed = 0;

    /// Wall times are only included when asked for.
    nlohmann::json to_json(bool include_wall_times = true) const;
    /// SHA-256 of the report without wall times.
    std::string canonical_digest() const;
};

struct BenchConfig {
    Character character;
    nlohmann::json script;   // scripted provider rules
    nlohmann::json genesis;  // ledger genesis
    nlohmann::json fixtures; // token performance and recommender rows
    std::map<std::string, std::string> settings;
    /// Task ids to run, in order. Empty runs 1..6.
    std::vector<int> order;
    std::filesystem::path media_dir = std::filesystem::temp_directory_path();
};

/// Loads character, script, genesis and fixtures from files.
BenchConfig load_bench_config(const std::filesystem::path& character, const std::filesystem::path& script,
                              const std::filesystem::path& genesis, const std::filesystem::path& fixtures);

/// The six basic-tier tasks against a fresh ledger, scripted provider and fixed clock.
BenchReport run_basic_suite(const BenchConfig& config);

inline constexpr const char* kBenchUser = "bench-user";
inline constexpr const char* kBenchRecipient = "sim:bench-recipient";
inline constexpr const char* kBenchPool = "SOL-TOK";

/// Trim, lowercase, collapse whitespace.
std::string normalize_answer(std::string_view answer);

/// Most frequent normalized answer; ties go to the earliest first occurrence.
/// Throws Error{EmptyInput}.
std::string majority_vote(const std::vector<std::string>& answers);

struct SwarmResult {
    std::string answer;
    std::map<std::string, std::size_t> tally;
    std::vector<std::string> answers; // per agent, normalized, in agent order
};

using RuntimeFactory = std::function<std::unique_ptr<Runtime>(std::size_t index)>;

/// Asks each of n runtimes the question concurrently and votes on the final
/// reply texts. Throws Error{EmptySwarm} when n is 0.
SwarmResult run_swarm(const std::string& question, std::size_t n_agents, const RuntimeFactory& factory);

} // namespace agentos
