// Runs acceptance criteria 1-11 and prints one PASS/FAIL line per criterion.
// Exit status is the number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "agentos/action_engine.hpp"
#include "agentos/agents.hpp"
#include "agentos/bench.hpp"
#include "agentos/character.hpp"
#include "agentos/error.hpp"
#include "agentos/ledger.hpp"
#include "agentos/media.hpp"
#include "agentos/memory.hpp"
#include "agentos/runtime.hpp"
#include "agentos/util.hpp"
#include "support.hpp"

using namespace agentos;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    return buf;
}

// 1 ------------------------------------------------------------------------

Outcome retrieval_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240101);
    const std::vector<std::string> vocab = {
        "swap", "token", "pool", "wallet", "image", "draw", "cat", "send", "price", "trust", "fee", "sol",
        "tok", "rug", "agent", "memory", "fact", "goal", "room", "alice", "bob", "trade", "market", "red",
        "square", "chain", "order", "limit", "post", "timeline", "liquidity", "reserve", "yield", "moon",
    };
    std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
    std::uniform_int_distribution<int> len(0, 8);
    auto sentence = [&] {
        std::string s;
        for (int i = len(rng); i > 0; --i) s += vocab[word(rng)] + " ";
        return s;
    };

    InMemoryAdapter store;
    std::vector<MemoryRecord> records;
    for (int i = 0; i < 1000; ++i) {
        MemoryRecord r;
        r.id = "m" + std::to_string(i);
        r.agent_id = "agent";
        r.user_id = "u";
        r.room_id = "room-" + std::to_string(i % 7);
        r.content.text = sentence();
        r.created_at = 1000 + (i * 37) % 1000; // shuffled timestamps
        store.store(r);
        records.push_back(*store.get(r.id));
    }
    for (const auto& r : records) {
        const auto ref = testing::oracle::embed(r.content.text);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (std::abs(ref[i] - r.embedding[i]) > 1e-12) return {false, "embedding of " + r.id + " differs"};
        }
    }

    std::size_t compared = 0;
    for (int q = 0; q < 100; ++q) {
        std::string text = sentence();
        if (text.empty()) text = vocab[word(rng)];
        const auto query = testing::oracle::embed(text);
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t i = 0; i < records.size(); ++i) {
            scored.emplace_back(testing::oracle::dot(query, records[i].embedding), i);
        }
        std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            const auto& ra = records[a.second];
            const auto& rb = records[b.second];
            if (ra.created_at != rb.created_at) return ra.created_at > rb.created_at;
            return a.second > b.second;
        });
        for (std::size_t k : {1, 5, 20}) {
            const auto got = store.search_similar(query, k, -1.0);
            if (got.size() != k) return {false, "query " + std::to_string(q) + " returned " + std::to_string(got.size())};
            for (std::size_t i = 0; i < k; ++i) {
                if (got[i].record.id != records[scored[i].second].id) {
                    return {false, "query " + std::to_string(q) + " k=" + std::to_string(k) + " rank " +
                                       std::to_string(i) + ": " + got[i].record.id + " vs " +
                                       records[scored[i].second].id};
                }
            }
            ++compared;
        }
    }
    const double s = seconds_since(t0);
    if (s >= 10.0) return {false, "took " + fmt_seconds(s)};
    return {true, std::to_string(compared) + " ranked lists identical to brute force in " + fmt_seconds(s)};
}

// 2 ------------------------------------------------------------------------

std::unique_ptr<Runtime> routing_agent(const fs::path& media_dir) {
    AgentSetup setup;
    setup.models = testing::scripted_models(testing::reply_script("ok"));
    setup.clock = std::make_shared<ManualClock>(0, 1);
    setup.ledger = Ledger::load_genesis(testing::fixture("genesis.json"));
    setup.media_dir = media_dir;
    setup.settings["INTENT_THRESHOLD"] = "0.55";
    auto runtime = build_agent(load_character(testing::sample_character_path()), setup);
    runtime->freeze();
    return runtime;
}

Outcome intent_corpus() {
    const auto t0 = Clock::now();
    testing::TempDir media;
    auto runtime = routing_agent(media.path());
    const auto corpus = testing::read_json(testing::fixture("intent_corpus.json"));
    const State state;
    std::map<std::string, std::pair<int, int>> tally; // kind -> (correct, total)
    std::vector<std::string> misses;
    for (const auto& u : corpus.at("utterances")) {
        const auto text = u.at("text").get<std::string>();
        const auto expect = u.at("expect").get<std::string>();
        const auto kind = u.at("kind").get<std::string>();
        const auto candidates = recognize_intent(*runtime, text, std::nullopt, state);
        const bool ok = !candidates.empty() && candidates.front().action == expect;
        auto& t = tally[kind];
        t.second += 1;
        t.first += ok ? 1 : 0;
        if (!ok) {
            const Embedding q = embed(text);
            const double score = dot(q, *runtime->action_embedding(expect));
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", score);
            misses.push_back(kind + " \"" + text + "\" -> " +
                             (candidates.empty() ? std::string("nothing") : candidates.front().action) +
                             " (cosine to " + expect + " " + buf + ")");
        }
    }
    int free_ok = 0;
    for (const auto& u : corpus.at("freeform")) {
        const auto candidates = recognize_intent(*runtime, u.at("text").get<std::string>(), std::nullopt, state);
        free_ok += !candidates.empty() && candidates.front().action == u.at("expect").get<std::string>();
    }
    const double s = seconds_since(t0);
    for (const auto& m : misses) std::cout << "    miss: " << m << "\n";
    const auto [sim_ok, sim_total] = tally["simile"];
    const auto [par_ok, par_total] = tally["paraphrase"];
    const bool pass = sim_total == 30 && par_total == 30 && sim_ok == sim_total && par_ok * 10 >= par_total * 9 &&
                      s < 5.0;
    return {pass, "simile " + std::to_string(sim_ok) + "/" + std::to_string(sim_total) + ", paraphrase " +
                      std::to_string(par_ok) + "/" + std::to_string(par_total) + " (needs 27), free-form " +
                      std::to_string(free_ok) + "/" + std::to_string(corpus.at("freeform").size()) +
                      " (informational), " + fmt_seconds(s)};
}

// 3 ------------------------------------------------------------------------

Outcome ledger_conservation() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    Ledger ledger("SOL", 100.0, 30);
    const std::vector<std::string> tokens = {"SOL", "TA", "TB", "TC", "TD"};
    std::vector<std::string> wallets;
    for (int i = 0; i < 20; ++i) {
        wallets.push_back("sim:w" + std::to_string(i));
        ledger.add_wallet(wallets.back());
    }
    std::uniform_int_distribution<Amount> initial(0, 5000 * kScale);
    for (const auto& w : wallets) {
        for (const auto& t : tokens) ledger.mint(w, t, initial(rng));
    }
    ledger.create_pool({"SOL-TA", "SOL", "TA", 1000 * kScale, 1'000'000 * kScale});
    ledger.create_pool({"SOL-TB", "SOL", "TB", 250 * kScale, 40'000 * kScale});
    ledger.create_pool({"SOL-TC", "SOL", "TC", 5000 * kScale, 5000 * kScale});
    const auto genesis = ledger.minted_supply();
    if (ledger.total_supply() != genesis) return {false, "supply mismatch at genesis"};

    std::uniform_int_distribution<std::size_t> pick_wallet(0, wallets.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_token(0, tokens.size() - 1);
    std::uniform_int_distribution<int> pick_pool(0, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::int64_t> slippage(1, 10000);
    const std::vector<std::string> pool_ids = {"SOL-TA", "SOL-TB", "SOL-TC"};

    int transfers = 0, swaps = 0, rejected = 0;
    for (int step = 0; step < 10000; ++step) {
        const auto& w = wallets[pick_wallet(rng)];
        const auto before_digest = ledger.digest();
        bool ok = true;
        if (coin(rng) == 0) {
            const auto& t = tokens[pick_token(rng)];
            const Amount have = ledger.balance(w, t);
            std::uniform_int_distribution<Amount> amt(1, std::max<Amount>(1, have + have / 10));
            try {
                ledger.transfer(w, wallets[pick_wallet(rng)], t, amt(rng));
                ++transfers;
            } catch (const Error&) {
                ok = false;
            }
        } else {
            const auto pool = *ledger.pool(pool_ids[static_cast<std::size_t>(pick_pool(rng))]);
            const auto& token_in = coin(rng) ? pool.token_a : pool.token_b;
            const Amount have = ledger.balance(w, token_in);
            std::uniform_int_distribution<Amount> amt(1, std::max<Amount>(1, have / 4));
            const __int128 k_before = static_cast<__int128>(pool.reserve_a) * pool.reserve_b;
            try {
                ledger.swap(w, pool.id, token_in, amt(rng), slippage(rng));
                ++swaps;
                const auto after = *ledger.pool(pool.id);
                const __int128 k_after = static_cast<__int128>(after.reserve_a) * after.reserve_b;
                if (k_after <= k_before) return {false, "k did not grow at step " + std::to_string(step)};
            } catch (const Error&) {
                ok = false;
            }
        }
        if (!ok) {
            ++rejected;
            if (ledger.digest() != before_digest) return {false, "failed op changed state at step " + std::to_string(step)};
        }
        if (ledger.total_supply() != genesis) return {false, "supply drift at step " + std::to_string(step)};
    }
    const double s = seconds_since(t0);
    if (s >= 10.0) return {false, "took " + fmt_seconds(s)};
    return {true, std::to_string(transfers) + " transfers, " + std::to_string(swaps) + " swaps, " +
                      std::to_string(rejected) + " rejected; supply exact, k strictly grew; " + fmt_seconds(s)};
}

// 4 ------------------------------------------------------------------------

json swap_script() {
    return {{"rules", {{{"match", "default"}, {"response", "Checking the trade.\nACTION: EXECUTE_SWAP"}}}}};
}

std::unique_ptr<Runtime> ledger_agent(const std::shared_ptr<Ledger>& ledger, const fs::path& media_dir) {
    AgentSetup setup;
    setup.models = testing::scripted_models(swap_script());
    setup.clock = std::make_shared<ManualClock>(1'700'000'000'000, 1000);
    setup.ledger = ledger;
    setup.media_dir = media_dir;
    auto runtime = build_agent(load_character(testing::sample_character_path()), setup);
    runtime->freeze();
    return runtime;
}

Outcome trust_gating() {
    testing::TempDir media;
    auto ledger = std::shared_ptr<Ledger>(Ledger::load_genesis(testing::fixture("genesis.json")));
    ledger->load_fixtures(testing::fixture("ledger_fixtures.json"));
    auto runtime = ledger_agent(ledger, media.path());
    const auto wallet = ledger->create_wallet("acceptance");
    ledger->bind_agent(runtime->agent_id(), wallet);
    ledger->mint(wallet, "SOL", 10 * kScale);

    const auto safe = *ledger->performance("TOK");
    const auto strong = ledger->metrics("strong");
    const double trust_safe = calculate_trust_score(safe, strong);
    // Hand evaluation of the trust formula on the fixture rows.
    const double risk = std::clamp(0.4 * safe.volatility + 0.4 * safe.holder_concentration +
                                       0.2 * (1.0 - std::min(safe.liquidity_usd / 1'000'000.0, 1.0)),
                                   0.0, 1.0);
    const double consistency = static_cast<double>(strong.successful) / static_cast<double>(strong.total_recommendations + 5);
    const double expected = 100.0 * (0.6 * (1.0 - risk) + 0.4 * consistency);
    if (std::abs(trust_safe - 96.1) > 0.05 || std::abs(trust_safe - expected) > 1e-9) {
        return {false, "trust(perf_safe, metrics_strong) = " + std::to_string(trust_safe)};
    }

    const auto log_before = ledger->swap_log().size();
    runtime->process_message(testing::message("strong", "trust", "swap 1 SOL for TOK"));
    const auto log = ledger->swap_log();
    if (log.size() != log_before + 1 || ledger->balance(wallet, "TOK") <= 0) {
        return {false, "safe swap did not execute"};
    }

    const double trust_risky = calculate_trust_score(*ledger->performance("RUG"), ledger->metrics("weak"));
    if (!(trust_risky < 50.0)) return {false, "trust(perf_risky, metrics_weak) = " + std::to_string(trust_risky)};
    const auto digest = ledger->digest();
    const auto replies = runtime->process_message(testing::message("weak", "trust", "swap 1 SOL for RUG"));
    if (ledger->digest() != digest) return {false, "ledger changed after the gated swap"};
    if (ledger->swap_log().size() != log_before + 1) return {false, "gated swap was logged"};
    for (const auto& r : replies) {
        if (r.action && *r.action == "EXECUTE_SWAP") return {false, "gated swap reported as executed"};
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "safe %.4f executed; risky %.4f blocked, digest unchanged", trust_safe, trust_risky);
    return {true, buf};
}

// 5 ------------------------------------------------------------------------

Outcome buy_tiers() {
    auto ledger = Ledger::load_genesis(testing::fixture("genesis.json"));
    ledger->load_fixtures(testing::fixture("ledger_fixtures.json"));
    std::vector<std::string> tokens;
    for (const auto& row : testing::read_json(testing::fixture("ledger_fixtures.json"))) {
        if (row.contains("token")) tokens.push_back(row.at("token").get<std::string>());
    }
    for (const auto& t : tokens) {
        const auto b = ledger->calculate_buy_amounts(t);
        if (!(b.none == 0.0 && b.none <= b.low && b.low <= b.medium && b.medium <= b.high)) {
            return {false, "tier order broken for " + t};
        }
        if (b.high <= 0.0) return {false, t + " has no liquidity in genesis"};
    }
    const auto example = buy_amounts_for_liquidity(100'000.0, ledger->native_price_usd());
    if (example.none != 0.0 || example.low != 1.0 || example.medium != 5.0 || example.high != 10.0) {
        return {false, "$100k example gave " + std::to_string(example.low) + "/" + std::to_string(example.medium) +
                           "/" + std::to_string(example.high)};
    }
    if (ledger->liquidity_usd("USDC") != 100'000.0) return {false, "SOL-USDC pool is not $100k deep"};
    const auto usdc = ledger->calculate_buy_amounts("USDC");
    if (usdc.low != 1.0 || usdc.medium != 5.0 || usdc.high != 10.0) return {false, "USDC pool tiers differ"};
    return {true, std::to_string(tokens.size()) + " fixture tokens ordered; $100k -> (1, 5, 10) exactly"};
}

// 6 ------------------------------------------------------------------------

struct ReplayRun {
    std::string transcript;
    std::string store_digest;
};

ReplayRun replay(const json& convo, const std::string& adapter, const fs::path& memory_file,
                 const fs::path& media_dir) {
    AgentSetup setup;
    setup.models = testing::scripted_models(convo.at("script"));
    setup.clock = std::make_shared<ManualClock>(1'700'000'000'000, 1000);
    setup.ledger = Ledger::load_genesis(testing::fixture("genesis.json"));
    setup.ledger->load_fixtures(testing::fixture("ledger_fixtures.json"));
    setup.media_dir = media_dir;
    setup.adapter = adapter;
    if (adapter == "file") setup.settings["MEMORY_FILE"] = memory_file.string();
    auto runtime = build_agent(load_character(testing::sample_character_path()), setup);
    runtime->freeze();
    runtime->start_clients();

    json transcript = json::array();
    for (const auto& turn : convo.at("turns")) {
        auto replies = runtime->process_message(
            testing::message(convo.at("user"), convo.at("room"), turn.get<std::string>()));
        transcript.push_back(to_json(replies));
    }
    runtime->stop_clients();
    runtime->memory().flush();
    return {transcript.dump(), runtime->memory().digest()};
}

Outcome replay_determinism() {
    const auto convo = testing::read_json(testing::fixture("conversation.json"));
    if (convo.at("turns").size() != 12) return {false, "reference conversation is not 12 turns"};
    testing::TempDir dir;
    const auto a = replay(convo, "memory", {}, dir.path());
    const auto b = replay(convo, "memory", {}, dir.path());
    const auto c = replay(convo, "file", dir.path() / "one.jsonl", dir.path());
    const auto d = replay(convo, "file", dir.path() / "two.jsonl", dir.path());
    if (a.transcript != b.transcript || a.store_digest != b.store_digest) return {false, "memory runs differ"};
    if (c.transcript != d.transcript || c.store_digest != d.store_digest) return {false, "file runs differ"};
    if (a.transcript != c.transcript) return {false, "transcripts differ across adapters"};
    if (a.store_digest != c.store_digest) return {false, "store digests differ across adapters"};
    FileAdapter reopened(dir.path() / "one.jsonl");
    if (reopened.digest() != c.store_digest) return {false, "reopened file store digest differs"};
    return {true, "4 runs, transcript sha " + sha256_hex(a.transcript).substr(0, 12) + ", store " +
                      a.store_digest.substr(0, 12)};
}

// 7 ------------------------------------------------------------------------

Outcome bench_suite() {
    const auto t0 = Clock::now();
    testing::TempDir media;
    auto cfg = load_bench_config(testing::sample_character_path(), testing::fixture("bench.script.json"),
                                 testing::fixture("genesis.json"), testing::fixture("ledger_fixtures.json"));
    cfg.media_dir = media.path();
    const auto first = run_basic_suite(cfg);
    const auto second = run_basic_suite(cfg);
    const double s = seconds_since(t0);
    for (const auto& t : first.tasks) {
        if (!t.pass) return {false, "task " + std::to_string(t.id) + " failed: " + t.diagnostic};
    }
    if (first.passed != 6 || first.tasks.size() != 6) return {false, std::to_string(first.passed) + "/6"};
    if (first.canonical_digest() != second.canonical_digest()) return {false, "digest differs across runs"};
    if (s >= 10.0) return {false, "took " + fmt_seconds(s)};
    return {true, "6/6, digest " + first.canonical_digest().substr(0, 16) + " stable, " + fmt_seconds(s / 2) + " per run"};
}

// 8 ------------------------------------------------------------------------

Outcome swarm_vote() {
    const std::vector<std::vector<std::string>> orders = {
        {"A", "A", "B"}, {"A", "B", "A"}, {"B", "A", "A"},
    };
    for (const auto& answers : orders) {
        auto factory = [&](std::size_t i) {
            return testing::bare_runtime(testing::reply_script(answers[i] + "\nACTION: NONE"),
                                         testing::minimal_character("Voter" + std::to_string(i)));
        };
        const auto result = run_swarm("Which option?", answers.size(), factory);
        const std::map<std::string, std::size_t> expected = {{normalize_answer("A"), 2}, {normalize_answer("B"), 1}};
        if (result.answer != normalize_answer("A") || result.tally != expected) {
            return {false, "order " + answers[0] + answers[1] + answers[2] + " voted " + result.answer};
        }
    }
    return {true, "3 agents (A, A, B) in 3 orders -> \"" + normalize_answer("A") + "\", tally {a:2, b:1}"};
}

// 9 ------------------------------------------------------------------------

std::string generate_through_runtime(const fs::path& base) {
    AgentSetup setup;
    setup.models = testing::scripted_models(testing::reply_script("Here you go.\nACTION: GENERATE_IMAGE"));
    setup.clock = std::make_shared<ManualClock>(1'700'000'000'000, 1000);
    setup.ledger = std::make_shared<Ledger>();
    setup.media_dir = base;
    auto runtime = build_agent(load_character(testing::sample_character_path()), setup);
    runtime->freeze();
    const auto replies = runtime->process_message(testing::message("u", "art", "draw a red square"));
    for (const auto& r : replies) {
        for (const auto& a : r.attachments) return testing::read_file(a.url) + "\n@" + a.url;
    }
    return {};
}

Outcome media_determinism() {
    testing::TempDir one;
    testing::TempDir two;
    const auto a = generate_through_runtime(one.path());
    const auto b = generate_through_runtime(two.path());
    if (a.empty() || b.empty()) return {false, "no attachment produced"};
    const auto bytes_a = a.substr(0, a.rfind("\n@"));
    const auto bytes_b = b.substr(0, b.rfind("\n@"));
    if (bytes_a != bytes_b) return {false, "PNG bytes differ across runs"};
    if (bytes_a.compare(0, 8, std::string("\x89PNG\r\n\x1a\n", 8)) != 0) return {false, "PNG magic missing"};

    ImageOptions seeded;
    seeded.seed = 1234;
    seeded.width = 64;
    seeded.height = 32;
    if (generate_placeholder("a red square", seeded) != generate_placeholder("a red square", seeded)) {
        return {false, "seeded placeholder not deterministic"};
    }
    save_base64_image("data:image/png;base64," + base64_encode(bytes_a), "../../escape", one.path());

    for (const auto* dir : {&one, &two}) {
        const auto images = fs::weakly_canonical(dir->path() / kImageDir);
        for (const auto& entry : fs::recursive_directory_iterator(dir->path())) {
            if (!entry.is_regular_file()) continue;
            const auto parent = fs::weakly_canonical(entry.path().parent_path());
            if (parent != images) return {false, "file outside generatedImages: " + entry.path().string()};
        }
    }
    return {true, std::to_string(bytes_a.size()) + "-byte PNG identical across runs; files confined"};
}

// 10 -----------------------------------------------------------------------

Outcome character_schema() {
    const auto sample = testing::read_json(testing::sample_character_path());
    if (!validate_character(sample).empty()) return {false, "sample character has violations"};
    const auto mutations = testing::read_json(testing::fixture("character_mutations.json"));
    if (mutations.size() != 20) return {false, "expected 20 mutation cases"};
    for (const auto& m : mutations) {
        const auto doc = sample.patch(m.at("patch"));
        const auto violations = validate_character(doc);
        const auto path = m.at("path").get<std::string>();
        const bool hit = std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.path == path; });
        if (!hit) return {false, m.at("case").get<std::string>() + ": no violation at " + path};
    }
    std::mt19937_64 rng(10);
    for (int i = 0; i < 200; ++i) {
        const auto c = testing::random_character(rng);
        const auto doc = to_json(c);
        if (!validate_character(doc).empty()) return {false, "generated character " + std::to_string(i) + " invalid"};
        const auto back = character_from_json(json::parse(doc.dump()));
        if (!(back == c) || to_json(back) != doc) return {false, "round trip broke for character " + std::to_string(i)};
    }
    return {true, "sample valid; 20/20 mutations flagged at their paths; 200 round trips exact"};
}

// 11 -----------------------------------------------------------------------

ActionDef stub_action(const std::string& name, std::vector<std::string> similes) {
    ActionDef a;
    a.name = name;
    a.similes = std::move(similes);
    a.description = "stub " + name;
    a.validate = [](Runtime&, const MemoryRecord&) { return true; };
    a.handler = [](Runtime&, const MemoryRecord&, const State&, const ActionOptions&, ReplySink&) { return true; };
    return a;
}

EvaluatorDef stub_evaluator(const std::string& name) {
    return {name, "", [](const MemoryRecord&, const State&) { return true; },
            [](Runtime&, const MemoryRecord&, std::span<const MemoryRecord>) { return std::vector<EvaluationOutcome>{}; }};
}

ComponentHandle no_handle(Runtime&) {
    return nullptr;
}

void no_stop(ComponentHandle&) {}

Outcome plugin_atomicity() {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> small(0, 3);
    std::uniform_int_distribution<int> kind_dist(0, 5);
    int counter = 0;
    auto fresh = [&](const std::string& prefix) { return prefix + std::to_string(counter++); };

    for (int scenario = 0; scenario < 100; ++scenario) {
        auto runtime = testing::bare_runtime(testing::reply_script("ok"));
        // Pre-existing components, partly through an earlier plugin.
        PluginDef base;
        base.name = fresh("base");
        for (int i = small(rng); i >= 0; --i) base.actions.push_back(stub_action(fresh("ACT_"), {fresh("SIM_")}));
        for (int i = small(rng); i >= 0; --i) base.providers.push_back({fresh("prov"), [](const Runtime&, const MemoryRecord&, const State&) { return std::string(); }});
        for (int i = small(rng); i >= 0; --i) base.evaluators.push_back(stub_evaluator(fresh("eval")));
        for (int i = small(rng); i >= 0; --i) base.services.push_back({fresh("svc"), no_handle, no_stop});
        for (int i = small(rng); i >= 0; --i) base.clients.push_back({fresh("cli"), no_handle, no_stop});
        runtime->load_plugin(base);

        const auto digest_before = runtime->registry_digest();
        const auto plugins_before = runtime->list_plugins();

        PluginDef p;
        p.name = fresh("plugin");
        for (int i = small(rng); i >= 0; --i) p.actions.push_back(stub_action(fresh("NEW_"), {fresh("NEWSIM_")}));
        for (int i = small(rng); i >= 0; --i) p.providers.push_back({fresh("nprov"), [](const Runtime&, const MemoryRecord&, const State&) { return std::string(); }});
        for (int i = small(rng); i >= 0; --i) p.evaluators.push_back(stub_evaluator(fresh("neval")));
        for (int i = small(rng); i >= 0; --i) p.services.push_back({fresh("nsvc"), no_handle, no_stop});
        for (int i = small(rng); i >= 0; --i) p.clients.push_back({fresh("ncli"), no_handle, no_stop});

        // One conflicting component, placed in the middle of its list.
        auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
        std::string conflict;
        switch (kind_dist(rng)) {
            case 0: {
                const auto& existing = base.actions[pick(base.actions.size())];
                conflict = existing.name;
                p.actions.insert(p.actions.begin() + static_cast<std::ptrdiff_t>(pick(p.actions.size() + 1)),
                                 stub_action(fresh("FRESH_"), {existing.similes.front()}));
                break;
            }
            case 1: {
                conflict = base.actions[pick(base.actions.size())].name;
                p.actions.insert(p.actions.begin() + static_cast<std::ptrdiff_t>(pick(p.actions.size() + 1)),
                                 stub_action(conflict, {}));
                break;
            }
            case 2:
                conflict = base.providers[pick(base.providers.size())].name;
                p.providers.insert(p.providers.begin() + static_cast<std::ptrdiff_t>(pick(p.providers.size() + 1)),
                                   {conflict, [](const Runtime&, const MemoryRecord&, const State&) { return std::string(); }});
                break;
            case 3:
                conflict = base.evaluators[pick(base.evaluators.size())].name;
                p.evaluators.insert(p.evaluators.begin() + static_cast<std::ptrdiff_t>(pick(p.evaluators.size() + 1)),
                                    stub_evaluator(conflict));
                break;
            case 4:
                conflict = base.services[pick(base.services.size())].name;
                p.services.insert(p.services.begin() + static_cast<std::ptrdiff_t>(pick(p.services.size() + 1)),
                                  {conflict, no_handle, no_stop});
                break;
            default:
                conflict = base.clients[pick(base.clients.size())].name;
                p.clients.insert(p.clients.begin() + static_cast<std::ptrdiff_t>(pick(p.clients.size() + 1)),
                                 {conflict, no_handle, no_stop});
                break;
        }

        try {
            runtime->load_plugin(p);
            return {false, "scenario " + std::to_string(scenario) + ": conflict on " + conflict + " not detected"};
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PluginConflict) return {false, std::string("wrong error: ") + e.what()};
        }
        if (runtime->registry_digest() != digest_before) {
            return {false, "scenario " + std::to_string(scenario) + ": registry changed"};
        }
        if (runtime->list_plugins() != plugins_before) return {false, "plugin list changed"};
        for (const auto& a : p.actions) {
            if (a.name.rfind("NEW_", 0) == 0 && runtime->resolve_action(a.name) != nullptr) {
                return {false, "scenario " + std::to_string(scenario) + ": " + a.name + " leaked"};
            }
            for (const auto& s : a.similes) {
                if (s.rfind("NEWSIM_", 0) == 0 && runtime->resolve_action(s) != nullptr) {
                    return {false, "scenario " + std::to_string(scenario) + ": simile " + s + " leaked"};
                }
            }
        }
    }
    return {true, "100 scenarios: conflict detected, registry digest unchanged"};
}

} // namespace

int main() {
    spdlog::set_level(spdlog::level::off);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"retrieval oracle equivalence", retrieval_oracle},
        {"intent routing corpus", intent_corpus},
        {"ledger conservation", ledger_conservation},
        {"trust gating", trust_gating},
        {"buy-amount tiers", buy_tiers},
        {"replay determinism", replay_determinism},
        {"bench basic suite", bench_suite},
        {"swarm voting", swarm_vote},
        {"media determinism", media_determinism},
        {"character schema", character_schema},
        {"plugin atomicity", plugin_atomicity},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first
                  << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failures;
}
