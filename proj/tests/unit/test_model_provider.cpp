#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "agentos/error.hpp"
#include "agentos/model_provider.hpp"
#include "agentos/util.hpp"
#include "support.hpp"

using namespace agentos;
using nlohmann::json;

namespace {

CompletionRequest req(const std::string& prompt) {
    CompletionRequest r;
    r.prompt = prompt;
    return r;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

class StubServer {
public:
    explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/v1/complete", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/complete"; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

HttpProviderConfig http_config(const std::string& url) {
    HttpProviderConfig c;
    c.url = url;
    c.timeout = std::chrono::milliseconds(2000);
    c.retries = 2;
    c.backoff = std::chrono::milliseconds(5);
    return c;
}

} // namespace

TEST_CASE("scripted lookup order is exact, then contains, then default") {
    const json script = {{"rules",
                          {{{"match", "default"}, {"response", "fallback"}},
                           {{"match", "contains"}, {"pattern", "swap"}, {"response", "contains-1"}},
                           {{"match", "contains"}, {"pattern", "sw"}, {"response", "contains-2"}},
                           {{"match", "exact"}, {"prompt", "please swap"}, {"response", "exact"}}}}};
    auto p = ScriptedProvider::from_json(script);
    CHECK(p->complete(req("please swap")) == "exact");
    CHECK(p->complete(req("swap now")) == "contains-1");
    CHECK(p->complete(req("draw")) == "fallback");
    CHECK(p->complete(req("sw")) == "contains-2");
    CHECK(p->calls() == 4);
}

TEST_CASE("exact rules match the prompt digest") {
    auto p = ScriptedProvider::from_json(
        json{{"rules", {{{"match", "exact"}, {"pattern", sha256_hex("hi")}, {"response", "yes"}}}}});
    CHECK(p->complete(req("hi")) == "yes");
    CHECK(code_of([&] { p->complete(req("hi ")); }) == ErrorCode::NoRuleMatched);
}

TEST_CASE("consume-once rules fire a single time") {
    auto p = ScriptedProvider::from_json(json::array({
        {{"match", "contains"}, {"pattern", "x"}, {"response", "first"}, {"once", true}},
        {{"match", "contains"}, {"pattern", "x"}, {"response", "second"}, {"once", true}},
        {{"match", "default"}, {"response", "rest"}, {"once", true}},
    }));
    CHECK(p->complete(req("x")) == "first");
    CHECK(p->complete(req("x")) == "second");
    CHECK(p->complete(req("x")) == "rest");
    CHECK(code_of([&] { p->complete(req("x")); }) == ErrorCode::NoRuleMatched);
}

TEST_CASE("scripted provider rejects bad input") {
    CHECK(code_of([] { ScriptedProvider::from_json(json::array({{{"match", "regex"}, {"response", "r"}}})); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] {
              ScriptedProvider::from_json(
                  json::array({{{"match", "default"}, {"response", "a"}}, {{"match", "default"}, {"response", "b"}}}));
          }) == ErrorCode::InvalidArgument);
    auto p = ScriptedProvider::from_json(testing::reply_script("ok"));
    CHECK(code_of([&] { p->complete(req("")); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ScriptedProvider::load("/nonexistent/script.json"); }) == ErrorCode::FileNotFound);
}

TEST_CASE("scripted provider ignores temperature and seed") {
    auto p = ScriptedProvider::from_json(testing::reply_script("same"));
    auto r = req("p");
    r.temperature = 1.5;
    r.seed = 42;
    CHECK(p->complete(r) == p->complete(req("p")));
}

TEST_CASE("fixture scripts load") {
    for (const auto* name : {"bench.script.json", "conversation.json"}) {
        const auto doc = testing::read_json(testing::fixture(name));
        const auto& script = doc.contains("script") ? doc.at("script") : doc;
        CHECK_NOTHROW(ScriptedProvider::from_json(script));
    }
}

TEST_CASE("registry lookup and duplicates") {
    ModelRegistry reg;
    reg.register_provider("a", ScriptedProvider::from_json(testing::reply_script("A")));
    CHECK(reg.contains("a"));
    CHECK(reg.complete("a", req("x")) == "A");
    CHECK(code_of([&] { reg.get("b"); }) == ErrorCode::UnknownModelProvider);
    CHECK(code_of([&] { reg.register_provider("a", ScriptedProvider::from_json(testing::reply_script("B"))); }) ==
          ErrorCode::DuplicateModelProvider);
    CHECK(reg.ids() == std::vector<std::string>{"a"});
}

TEST_CASE("http provider posts the prompt and returns text") {
    std::string seen_body;
    std::string seen_auth;
    StubServer server([&](const httplib::Request& r, httplib::Response& res) {
        seen_body = r.body;
        seen_auth = r.get_header_value("Authorization");
        res.set_content(R"({"text":"hello back"})", "application/json");
    });
    auto cfg = http_config(server.url());
    cfg.api_key = "k-123";
    HttpProvider p(cfg);
    auto r = req("say \"hi\"");
    r.max_tokens = 7;
    CHECK(p.complete(r) == "hello back");
    const auto body = json::parse(seen_body);
    CHECK(body.at("prompt") == "say \"hi\"");
    CHECK(body.at("max_tokens") == 7);
    CHECK(seen_auth == "Bearer k-123");
}

TEST_CASE("http provider retries server errors") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        if (hits.fetch_add(1) < 2) {
            res.status = 503;
            return;
        }
        res.set_content(R"({"text":"third time"})", "application/json");
    });
    HttpProvider p(http_config(server.url()));
    CHECK(p.complete(req("x")) == "third time");
    CHECK(hits == 3);
}

TEST_CASE("http provider gives up after the retry budget") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });
    HttpProvider p(http_config(server.url()));
    CHECK(code_of([&] { p.complete(req("x")); }) == ErrorCode::HttpFailure);
    CHECK(hits == 3);
}

TEST_CASE("http provider does not retry client errors") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 401;
    });
    HttpProvider p(http_config(server.url()));
    CHECK(code_of([&] { p.complete(req("x")); }) == ErrorCode::HttpFailure);
    CHECK(hits == 1);
}

TEST_CASE("http provider rejects malformed responses") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"completion":"x"})", "application/json");
    });
    HttpProvider p(http_config(server.url()));
    CHECK(code_of([&] { p.complete(req("x")); }) == ErrorCode::HttpFailure);
}

TEST_CASE("http provider times out") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(600));
        res.set_content(R"({"text":"late"})", "application/json");
    });
    auto cfg = http_config(server.url());
    cfg.timeout = std::chrono::milliseconds(150);
    cfg.retries = 0;
    HttpProvider p(cfg);
    CHECK(code_of([&] { p.complete(req("x")); }) == ErrorCode::Timeout);
}

TEST_CASE("http provider reports unreachable hosts") {
    auto cfg = http_config("http://127.0.0.1:1/v1/complete");
    cfg.retries = 1;
    HttpProvider p(cfg);
    const auto code = code_of([&] { p.complete(req("x")); });
    CHECK((code == ErrorCode::HttpFailure || code == ErrorCode::Timeout));
}

TEST_CASE("http provider validates its url and prompt") {
    CHECK(code_of([] { HttpProvider p(http_config("ftp://x")); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { HttpProvider p(http_config("https://api.example.com/v1")); }) == ErrorCode::InvalidArgument);
    HttpProvider p(http_config("http://127.0.0.1:1/"));
    CHECK(code_of([&] { p.complete(req("")); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { HttpProvider::request_body(req("bad \xff utf8")); }) == ErrorCode::InvalidArgument);
}
