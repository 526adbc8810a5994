#include "agentos/bench.hpp"

#include <chrono>
#include <fstream>
#include <future>

#include <spdlog/spdlog.h>

#include "agentos/agents.hpp"
#include "agentos/error.hpp"
#include "agentos/ledger.hpp"
#include "agentos/social.hpp"
#include "agentos/util.hpp"

namespace agentos {

using nlohmann::json;

namespace {

constexpr Timestamp kBenchEpoch = 1'700'000'000'000;

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedJson, path.string() + ": " + e.what());
    }
}

struct BenchContext {
    Runtime& runtime;
    Ledger& ledger;
};

std::string room_of(int task) {
    return "bench-task-" + std::to_string(task);
}

std::vector<AgentReply> send(BenchContext& ctx, int task, const std::string& text) {
    MemoryRecord m;
    m.user_id = kBenchUser;
    m.room_id = room_of(task);
    m.content.text = text;
    return ctx.runtime.process_message(std::move(m));
}

std::string describe(const std::vector<AgentReply>& replies) {
    std::vector<std::string> parts;
    for (const auto& r : replies) parts.push_back("[" + r.action.value_or("-") + "] " + r.text);
    return parts.empty() ? "no replies" : join(parts, " | ");
}

std::string ensure_wallet(BenchContext& ctx) {
    if (auto w = ctx.ledger.wallet_of(ctx.runtime.agent_id())) return *w;
    const auto address = ctx.ledger.create_wallet("bench-setup");
    ctx.ledger.bind_agent(ctx.runtime.agent_id(), address);
    return address;
}

void top_up(BenchContext& ctx, const std::string& wallet, const std::string& token, Amount needed) {
    const Amount have = ctx.ledger.balance(wallet, token);
    if (have < needed) ctx.ledger.mint(wallet, token, needed - have);
}

using Check = std::pair<bool, std::string>;

Check task_create_wallet(BenchContext& ctx) {
    const auto before = ctx.ledger.wallets().size();
    const auto replies = send(ctx, 1, "Task 1: set me up with a fresh wallet address.");
    const auto after = ctx.ledger.wallets().size();
    if (after != before + 1) return {false, "wallet count " + std::to_string(before) + " -> " + std::to_string(after) + "; " + describe(replies)};
    if (!ctx.ledger.wallet_of(ctx.runtime.agent_id())) return {false, "agent has no wallet"};
    return {true, ""};
}

Check task_receive(BenchContext& ctx) {
    const auto wallet = ensure_wallet(ctx);
    const Amount before = ctx.ledger.balance(wallet, "TOK");
    ctx.ledger.mint(wallet, "TOK", 100 * kScale);
    const auto replies = send(ctx, 2, "Task 2: some tokens should have landed in my account, what do I hold now?");
    if (ctx.ledger.balance(wallet, "TOK") != before + 100 * kScale) return {false, "TOK balance changed unexpectedly"};
    for (const auto& r : ctx.runtime.memory().room_records(room_of(2), 64)) {
        if (r.user_id == ctx.runtime.agent_id() && r.content.action == "WALLET_BALANCE") return {true, ""};
    }
    return {false, "no balance report; " + describe(replies)};
}

Check task_transfer(BenchContext& ctx) {
    const auto wallet = ensure_wallet(ctx);
    top_up(ctx, wallet, "TOK", 40 * kScale);
    if (!ctx.ledger.has_wallet(kBenchRecipient)) ctx.ledger.add_wallet(kBenchRecipient);
    const Amount before = ctx.ledger.balance(kBenchRecipient, "TOK");
    const auto replies = send(ctx, 3, std::string("Task 3: please move 40 TOK to ") + kBenchRecipient + ".");
    const Amount after = ctx.ledger.balance(kBenchRecipient, "TOK");
    if (after - before != 40 * kScale) return {false, "recipient received " + format_amount(after - before) + "; " + describe(replies)};
    return {true, ""};
}

Check task_contract(BenchContext& ctx) {
    const auto wallet = ensure_wallet(ctx);
    const auto pool = ctx.ledger.pool(kBenchPool);
    if (!pool) return {false, std::string("genesis has no pool ") + kBenchPool};
    const Amount one = kScale;
    const Amount counterpart = static_cast<Amount>(static_cast<__int128>(one) * pool->reserve_b / pool->reserve_a);
    top_up(ctx, wallet, pool->token_a, one);
    top_up(ctx, wallet, pool->token_b, counterpart + 1);
    const auto replies = send(ctx, 4, std::string("Task 4: put 1 SOL into pool ") + kBenchPool + " for me.");
    const auto after = ctx.ledger.pool(kBenchPool);
    if (after->reserve_a - pool->reserve_a != one) return {false, "pool reserve unchanged; " + describe(replies)};
    return {true, ""};
}

Check task_swap(BenchContext& ctx) {
    const auto wallet = ensure_wallet(ctx);
    top_up(ctx, wallet, "SOL", kScale);
    const auto log_before = ctx.ledger.swap_log().size();
    const Amount tok_before = ctx.ledger.balance(wallet, "TOK");
    const auto replies = send(ctx, 5, "Task 5: go ahead with 1 SOL for TOK.");
    const auto log = ctx.ledger.swap_log();
    if (log.size() != log_before + 1) return {false, "no swap executed; " + describe(replies)};
    const auto& entry = log.back();
    if (entry.wallet != wallet) return {false, "swap from wrong wallet"};
    if (!entry.trust || *entry.trust < ctx.runtime.minimum_trust_threshold()) return {false, "swap bypassed trust gate"};
    if (ctx.ledger.balance(wallet, "TOK") <= tok_before) return {false, "TOK balance did not grow"};
    return {true, ""};
}

Check task_social(BenchContext& ctx) {
    const auto before = ctx.runtime.memory().room_records(kSocialRoom, ctx.runtime.memory().count() + 1).size();
    const auto replies = send(ctx, 6, "Task 6: share this on the timeline: gm from the bench");
    const auto after = ctx.runtime.memory().room_records(kSocialRoom, ctx.runtime.memory().count() + 1).size();
    if (after != before + 1) return {false, "nothing posted; " + describe(replies)};
    return {true, ""};
}

struct TaskDef {
    int id;
    const char* name;
    Check (*run)(BenchContext&);
};

constexpr TaskDef kTasks[] = {
    {1, "create_wallet", task_create_wallet}, {2, "receive_tokens", task_receive},
    {3, "transfer_tokens", task_transfer},    {4, "contract_call", task_contract},
    {5, "swap_tokens", task_swap},            {6, "social_post", task_social},
};

} // namespace

json BenchReport::to_json(bool include_wall_times) const {
    json tasks_json = json::array();
    for (const auto& t : tasks) {
        json entry = {{"id", t.id}, {"name", t.name}, {"pass", t.pass}, {"diagnostic", t.diagnostic}};
        if (include_wall_times) entry["wallTimeMs"] = t.wall_ms;
        tasks_json.push_back(std::move(entry));
    }
    return {{"suite", suite},
            {"tier", tier},
            {"character", character},
            {"provider", provider},
            {"tasks", std::move(tasks_json)},
            {"passed", passed},
            {"total", tasks.size()}};
}

std::string BenchReport::canonical_digest() const {
    return sha256_hex(to_json(false).dump());
}

BenchConfig load_bench_config(const std::filesystem::path& character, const std::filesystem::path& script,
                              const std::filesystem::path& genesis, const std::filesystem::path& fixtures) {
    BenchConfig cfg;
    cfg.character = load_character(character);
    cfg.script = read_json(script);
    cfg.genesis = read_json(genesis);
    cfg.fixtures = read_json(fixtures);
    return cfg;
}

BenchReport run_basic_suite(const BenchConfig& config) {
    BenchReport report;
    report.suite = "basic";
    report.tier = "basic";
    report.character = config.character.name;

    auto models = std::make_shared<ModelRegistry>();
    const auto provider_id = config.character.model_provider_id;
    models->register_provider(provider_id, ScriptedProvider::from_json(config.script));
    report.provider = provider_id;

    std::shared_ptr<Ledger> ledger = Ledger::from_genesis(config.genesis);
    if (!config.fixtures.is_null()) ledger->load_fixtures(config.fixtures);

    AgentSetup setup;
    setup.models = models;
    setup.clock = std::make_shared<ManualClock>(kBenchEpoch, 1000);
    setup.ledger = ledger;
    setup.media_dir = config.media_dir;
    setup.settings = config.settings;

    auto runtime = build_agent(config.character, setup);
    runtime->freeze();
    runtime->start_clients();
    BenchContext ctx{*runtime, *ledger};

    std::vector<int> order = config.order;
    if (order.empty()) order = {1, 2, 3, 4, 5, 6};
    for (int id : order) {
        const auto* def = std::find_if(std::begin(kTasks), std::end(kTasks), [id](const TaskDef& t) { return t.id == id; });
        if (def == std::end(kTasks)) throw Error(ErrorCode::InvalidArgument, "unknown bench task " + std::to_string(id));
        BenchTaskResult result;
        result.id = def->id;
        result.name = def->name;
        const auto start = std::chrono::steady_clock::now();
        try {
            auto [pass, diagnostic] = def->run(ctx);
            result.pass = pass;
            result.diagnostic = std::move(diagnostic);
        } catch (const std::exception& e) {
            result.pass = false;
            result.diagnostic = e.what();
        }
        result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (result.pass) ++report.passed;
        spdlog::debug("bench task {} {}: {}", result.id, result.pass ? "pass" : "fail", result.diagnostic);
        report.tasks.push_back(std::move(result));
    }
    runtime->stop_clients();
    return report;
}

std::string normalize_answer(std::string_view answer) {
    return collapse_whitespace(to_lower(trim(answer)));
}

std::string majority_vote(const std::vector<std::string>& answers) {
    if (answers.empty()) throw Error(ErrorCode::EmptyInput, "no answers to vote on");
    std::vector<std::pair<std::string, std::size_t>> counts; // first-occurrence order
    for (const auto& a : answers) {
        const auto n = normalize_answer(a);
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == n; });
        if (it == counts.end()) {
            counts.emplace_back(n, 1);
        } else {
            ++it->second;
        }
    }
    const auto* best = &counts.front();
    for (const auto& c : counts) {
        if (c.second > best->second) best = &c;
    }
    return best->first;
}

SwarmResult run_swarm(const std::string& question, std::size_t n_agents, const RuntimeFactory& factory) {
    if (n_agents == 0) throw Error(ErrorCode::EmptySwarm, "swarm needs at least one agent");
    std::vector<std::unique_ptr<Runtime>> agents;
    agents.reserve(n_agents);
    for (std::size_t i = 0; i < n_agents; ++i) {
        auto r = factory(i);
        if (!r) throw Error(ErrorCode::InvalidArgument, "factory returned no runtime");
        r->freeze();
        agents.push_back(std::move(r));
    }

    std::vector<std::future<std::string>> pending;
    for (auto& agent : agents) {
        pending.push_back(std::async(std::launch::async, [&agent, &question] {
            MemoryRecord m;
            m.user_id = "swarm-user";
            m.room_id = "swarm";
            m.content.text = question;
            const auto replies = agent->process_message(std::move(m));
            return replies.empty() ? std::string() : replies.back().text;
        }));
    }

    SwarmResult result;
    for (auto& f : pending) result.answers.push_back(normalize_answer(f.get()));
    for (const auto& a : result.answers) ++result.tally[a];
    result.answer = majority_vote(result.answers);
    return result;
}

} // namespace agentos
