#include <doctest.h>

#include "agentos/evaluators.hpp"
#include "agentos/plugin.hpp"
#include "support.hpp"

using namespace agentos;

namespace {

std::vector<MemoryRecord> transcript(const std::vector<std::pair<std::string, std::string>>& lines) {
    std::vector<MemoryRecord> out;
    for (const auto& [user, text] : lines) out.push_back(testing::message(user, "r", text));
    return out;
}

void persist_facts(Runtime& rt, const std::vector<EvaluationOutcome>& outcomes) {
    for (const auto& o : outcomes) rt.remember("r", Content{o.text, std::nullopt, {}}, MemoryKind::Fact);
}

} // namespace

TEST_CASE("copular sentences become facts") {
    auto rt = testing::bare_runtime(testing::reply_script("x"));
    const auto ev = fact_evaluator();
    const auto t = transcript({{"alice", "Alice is a trader."}});
    const auto out = ev.run(*rt, t[0], t);
    REQUIRE(out.size() == 1);
    CHECK(out[0].kind == OutcomeKind::Fact);
    CHECK(out[0].text == "Alice is a trader.");
    persist_facts(*rt, out);
    CHECK(ev.run(*rt, t[0], t).empty());
}

TEST_CASE("no copular sentences and no model gives nothing") {
    auto rt = testing::bare_runtime(testing::reply_script("x"));
    const auto t = transcript({{"alice", "hello there"}, {"bob", "swap 2 SOL"}});
    CHECK(fact_evaluator().run(*rt, t[0], t).empty());
}

TEST_CASE("rule facts cover is and likes, skip questions") {
    CHECK(extract_rule_facts("Bob likes pizza. Is it raining? The pool is deep!") ==
          std::vector<std::string>{"Bob likes pizza.", "The pool is deep!"});
    CHECK(extract_rule_facts("what is this?").empty());
    CHECK(extract_rule_facts("Alice is\nBob likes tea") == std::vector<std::string>{"Bob likes tea"});
    CHECK(extract_rule_facts("").empty());
}

TEST_CASE("model facts are used when configured") {
    RuntimeConfig cfg;
    cfg.character = testing::minimal_character();
    cfg.settings["FACT_EXTRACTION_MODEL"] = "facts";
    auto models = testing::scripted_models(testing::reply_script("x"));
    models->register_provider("facts", ScriptedProvider::from_json(testing::reply_script("- Carol trades at night\nNONE\n")));
    Runtime rt(cfg, models);
    const auto t = transcript({{"carol", "I usually trade after midnight"}});
    const auto out = fact_evaluator().run(rt, t[0], t);
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "Carol trades at night");
}

TEST_CASE("goal objectives complete when the agent states them") {
    auto rt = testing::bare_runtime(testing::reply_script("x"));
    const auto ev = goal_evaluator();
    auto t = transcript({{"u", "make me a wallet"}});
    CHECK(ev.run(*rt, t[0], t).empty());

    Goal g;
    g.room_id = "r";
    g.name = "onboarding";
    g.objectives = {{"confirm wallet created", false}, {"explain fees", false}};
    const auto goal = rt->memory().create_goal(g);
    t.push_back(testing::message(rt->agent_id(), "r", "I confirm wallet created."));
    const auto out = ev.run(*rt, t[0], t);
    REQUIRE(out.size() == 1);
    CHECK(out[0].kind == OutcomeKind::GoalUpdate);
    CHECK(out[0].goal_id == goal.id);
    CHECK(out[0].objective_index == 0);

    rt->memory().update_objective(goal.id, 0, true);
    CHECK(ev.run(*rt, t[0], t).empty());
}

TEST_CASE("user lines do not complete objectives") {
    auto rt = testing::bare_runtime(testing::reply_script("x"));
    Goal g;
    g.room_id = "r";
    g.objectives = {{"confirm wallet created", false}};
    rt->memory().create_goal(g);
    const auto t = transcript({{"u", "confirm wallet created"}});
    CHECK(goal_evaluator().run(*rt, t[0], t).empty());
}

TEST_CASE("run_evaluators keeps order and isolates failures") {
    auto rt = testing::bare_runtime(testing::reply_script("x"));
    auto m = testing::message("u", "r", "Alice is a trader.");
    m.id = "m1";
    rt->memory().store(m);
    CHECK(run_evaluators(*rt, m, State{}).empty());

    std::vector<std::string> order;
    auto make = [&](const std::string& name, bool fail) {
        EvaluatorDef e;
        e.name = name;
        e.run = [&order, name, fail](Runtime&, const MemoryRecord&, std::span<const MemoryRecord>) {
            order.push_back(name);
            if (fail) throw std::runtime_error("evaluator broke");
            return std::vector<EvaluationOutcome>{};
        };
        return e;
    };
    rt->register_evaluator(make("first", false));
    rt->register_evaluator(make("broken", true));
    rt->register_evaluator(fact_evaluator());
    rt->register_evaluator(make("last", false));
    auto skipped = make("skipped", false);
    skipped.should_run = [](const MemoryRecord&, const State&) { return false; };
    rt->register_evaluator(skipped);

    const auto out = run_evaluators(*rt, m, State{});
    CHECK(order == std::vector<std::string>{"first", "broken", "last"});
    REQUIRE(out.size() == 1);
    const auto facts = rt->memory().room_records("r", 10, MemoryKind::Fact);
    REQUIRE(facts.size() == 1);
    CHECK(facts[0].content.text == "Alice is a trader.");
    run_evaluators(*rt, m, State{});
    CHECK(rt->memory().room_records("r", 10, MemoryKind::Fact).size() == 1);
}

TEST_CASE("pipeline records facts from user messages") {
    auto rt = testing::bare_runtime(testing::reply_script("Noted."));
    rt->load_plugin(bootstrap_plugin());
    rt->process_message(testing::message("alice", "r", "Alice is a trader."));
    rt->process_message(testing::message("alice", "r", "Alice is a trader."));
    const auto facts = rt->memory().room_records("r", 10, MemoryKind::Fact);
    REQUIRE(facts.size() == 1);
    CHECK(facts[0].content.text == "Alice is a trader.");
}
