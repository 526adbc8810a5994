#include <doctest.h>

#include "agentos/bench.hpp"
#include "agentos/error.hpp"
#include "support.hpp"

using namespace agentos;
using nlohmann::json;

namespace {

BenchConfig default_config() {
    auto cfg = load_bench_config(testing::sample_character_path(), testing::fixture("bench.script.json"),
                                 testing::fixture("genesis.json"), testing::fixture("ledger_fixtures.json"));
    return cfg;
}

std::map<int, bool> outcomes(const BenchReport& report) {
    std::map<int, bool> out;
    for (const auto& t : report.tasks) out[t.id] = t.pass;
    return out;
}

std::unique_ptr<Runtime> answering(const std::string& answer) {
    return testing::bare_runtime(testing::reply_script(answer + "\nACTION: NONE"));
}

} // namespace

TEST_CASE("basic suite passes with the bundled script and is reproducible") {
    testing::TempDir media;
    auto cfg = default_config();
    cfg.media_dir = media.path();
    const auto first = run_basic_suite(cfg);
    REQUIRE(first.tasks.size() == 6);
    for (const auto& t : first.tasks) {
        INFO(t.id << " " << t.name << ": " << t.diagnostic);
        CHECK(t.pass);
    }
    CHECK(first.passed == 6);
    const auto second = run_basic_suite(cfg);
    CHECK(first.canonical_digest() == second.canonical_digest());
    CHECK(first.to_json(false) == second.to_json(false));

    const auto doc = first.to_json();
    CHECK(doc["suite"] == "basic");
    CHECK(doc["total"] == 6);
    CHECK(doc["tasks"][0].contains("wallTimeMs"));
    CHECK_FALSE(first.to_json(false)["tasks"][0].contains("wallTimeMs"));
}

TEST_CASE("a broken swap rule fails only the swap task") {
    auto cfg = default_config();
    for (auto& rule : cfg.script["rules"]) {
        auto response = rule["response"].get<std::string>();
        if (auto pos = response.find("EXECUTE_SWAP"); pos != std::string::npos) {
            rule["response"] = response.substr(0, pos) + "EXECUTE_SWIM";
        }
    }
    const auto report = run_basic_suite(cfg);
    const auto o = outcomes(report);
    CHECK(report.passed == 5);
    CHECK_FALSE(o.at(5));
    for (int id : {1, 2, 3, 4, 6}) CHECK(o.at(id));
    CHECK(report.tasks[4].diagnostic.find("no swap executed") == 0);
}

TEST_CASE("a script that never proposes actions passes nothing") {
    auto cfg = default_config();
    cfg.script = testing::reply_script("I would rather chat.");
    const auto report = run_basic_suite(cfg);
    CHECK(report.passed == 0);
    for (const auto& t : report.tasks) CHECK_FALSE(t.diagnostic.empty());
}

TEST_CASE("order of the first three tasks does not change outcomes") {
    auto cfg = default_config();
    const auto baseline = outcomes(run_basic_suite(cfg));
    std::vector<int> head = {1, 2, 3};
    do {
        cfg.order = head;
        for (int id : {4, 5, 6}) cfg.order.push_back(id);
        const auto report = run_basic_suite(cfg);
        CHECK(outcomes(report) == baseline);
        REQUIRE(report.tasks.size() == 6);
        CHECK(report.tasks[0].id == head[0]);
    } while (std::next_permutation(head.begin(), head.end()));
}

TEST_CASE("unknown task ids are rejected") {
    auto cfg = default_config();
    cfg.order = {1, 9};
    CHECK_THROWS_AS(run_basic_suite(cfg), Error);
}

TEST_CASE("majority vote") {
    CHECK(majority_vote({"a", "b", "a"}) == "a");
    CHECK(majority_vote({"b", "a"}) == "b");
    CHECK(majority_vote({"x", "y", "y", "x"}) == "x");
    CHECK(majority_vote({"  Paris ", "paris", "London"}) == "paris");
    CHECK(majority_vote({"New   York", "new york", "Boston", "Boston", "Boston"}) == "boston");
    CHECK(majority_vote({"only"}) == "only");
    try {
        majority_vote({});
        FAIL("expected an Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInput);
    }
    CHECK(normalize_answer("  Hello \t  World\n") == "hello world");
}

TEST_CASE("majority vote tie-break matches a first-occurrence oracle") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> pool = {"a", "A ", "b", "c", " C", "d"};
    for (int round = 0; round < 500; ++round) {
        std::vector<std::string> answers(1 + rng() % 7);
        for (auto& a : answers) a = pool[rng() % pool.size()];
        std::vector<std::string> norm;
        for (auto& a : answers) norm.push_back(normalize_answer(a));
        std::string best;
        long best_count = 0;
        for (const auto& n : norm) {
            const long c = std::count(norm.begin(), norm.end(), n);
            if (c > best_count) {
                best = n;
                best_count = c;
            }
        }
        CHECK(majority_vote(answers) == best);
    }
}

TEST_CASE("swarm voting") {
    const std::vector<std::string> answers = {"Blue", "red", "blue ", "green", "RED"};
    const auto result = run_swarm("what colour?", answers.size(),
                                  [&](std::size_t i) { return answering(answers[i]); });
    CHECK(result.answers == std::vector<std::string>{"blue", "red", "blue", "green", "red"});
    CHECK(result.answer == "blue");
    CHECK(result.tally.at("red") == 2);
    CHECK(result.tally.at("green") == 1);

    const auto solo = run_swarm("q", 1, [](std::size_t) { return answering("Yes"); });
    CHECK(solo.answer == "yes");

    try {
        run_swarm("q", 0, [](std::size_t) { return answering("x"); });
        FAIL("expected an Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptySwarm);
    }
    CHECK_THROWS_AS(run_swarm("q", 2, [](std::size_t) { return std::unique_ptr<Runtime>(); }), Error);
}
