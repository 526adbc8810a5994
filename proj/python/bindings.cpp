// Thin pybind11 layer. Structured values cross the boundary as JSON text;
// the Python package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "agentos/agents.hpp"
#include "agentos/bench.hpp"
#include "agentos/error.hpp"
#include "agentos/ledger.hpp"
#include "agentos/logging.hpp"
#include "agentos/memory.hpp"

namespace py = pybind11;
using namespace agentos;
using nlohmann::json;

namespace {

class PyAgent {
public:
    PyAgent(const std::string& character_json, const std::string& script_json,
            const std::map<std::string, std::string>& settings, const std::string& genesis_json,
            const std::string& fixtures_json, std::int64_t clock_start_ms) {
        const auto character = character_from_json(json::parse(character_json));
        AgentSetup setup;
        setup.models = std::make_shared<ModelRegistry>();
        setup.models->register_provider(character.model_provider_id,
                                        ScriptedProvider::from_json(json::parse(script_json)));
        if (clock_start_ms >= 0) setup.clock = std::make_shared<ManualClock>(clock_start_ms, 1000);
        setup.settings = settings;
        setup.media_dir = std::filesystem::temp_directory_path();
        ledger_ = genesis_json.empty() ? std::make_shared<Ledger>() : std::shared_ptr<Ledger>(Ledger::from_genesis(json::parse(genesis_json)));
        if (!fixtures_json.empty()) ledger_->load_fixtures(json::parse(fixtures_json));
        setup.ledger = ledger_;
        runtime_ = build_agent(character, setup);
        runtime_->freeze();
        runtime_->start_services();
        runtime_->start_clients();
    }

    std::string agent_id() const { return runtime_->agent_id(); }

    std::string send(const std::string& user_id, const std::string& room_id, const std::string& text) {
        MemoryRecord m;
        m.user_id = user_id;
        m.room_id = room_id;
        m.content.text = text;
        std::vector<AgentReply> replies;
        {
            py::gil_scoped_release release;
            replies = runtime_->process_message(std::move(m));
        }
        return to_json(replies).dump();
    }

    std::string memories(const std::string& room_id, std::size_t count) const {
        json out = json::array();
        for (const auto& r : runtime_->memory().room_records(room_id, count)) out.push_back(to_json(r, false));
        return out.dump();
    }

    std::string balances_of_agent() const {
        const auto wallet = ledger_->wallet_of(runtime_->agent_id());
        if (!wallet) return "{}";
        json out = json::object();
        for (const auto& [token, amount] : ledger_->balances(*wallet)) out[token] = amount;
        return out.dump();
    }

private:
    std::shared_ptr<Ledger> ledger_;
    std::unique_ptr<Runtime> runtime_;
};

} // namespace

PYBIND11_MODULE(_agentos, m) {
    m.doc() = "agent runtime core";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&]() { return py::exception<Error>(m, "AgentOSError"); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const auto args = py::make_tuple(redact_secrets(e.what()), std::string(to_string(e.code())));
            PyErr_SetObject(error_type.get_stored().ptr(), args.ptr());
        }
    });

    m.attr("SCALE") = kScale;

    m.def("validate_character", [](const std::string& doc) {
        json out = json::array();
        for (const auto& v : validate_character(json::parse(doc))) out.push_back({{"path", v.path}, {"message", v.message}});
        return out.dump();
    });
    m.def("redacted_character", [](const std::string& doc) {
        return to_redacted_json(character_from_json(json::parse(doc))).dump();
    });
    m.def("embed", [](const std::string& text) { return embed(text); });
    m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) { return cosine(a, b); });
    m.def("redact_secrets", [](const std::string& text) { return redact_secrets(text); });

    m.def("trust_score", [](double liquidity_usd, double volatility, double holder_concentration,
                            double price_change_24h, std::int64_t total, std::int64_t successful) {
        TokenPerformance perf{"", liquidity_usd, volatility, holder_concentration, price_change_24h};
        RecommenderMetrics metrics{"", total, successful};
        return calculate_trust_score(perf, metrics);
    });

    py::class_<Ledger, std::shared_ptr<Ledger>>(m, "Ledger")
        .def(py::init<std::string, double, std::int64_t>(), py::arg("native_token") = "SOL",
             py::arg("native_price_usd") = 100.0, py::arg("fee_bps") = kDefaultFeeBps)
        .def_static("from_genesis",
                    [](const std::string& doc) { return std::shared_ptr<Ledger>(Ledger::from_genesis(json::parse(doc))); })
        .def("create_wallet", &Ledger::create_wallet)
        .def("add_wallet", &Ledger::add_wallet)
        .def("wallets", &Ledger::wallets)
        .def("mint", &Ledger::mint)
        .def("create_pool", [](Ledger& l, const std::string& id, const std::string& a, const std::string& b,
                               Amount ra, Amount rb) { l.create_pool(Pool{id, a, b, ra, rb}); })
        .def("balance", &Ledger::balance)
        .def("balances", &Ledger::balances)
        .def("transfer", &Ledger::transfer)
        .def("quote", &Ledger::quote)
        .def("swap", [](Ledger& l, const std::string& wallet, const std::string& pool, const std::string& token_in,
                        Amount amount_in, std::int64_t max_slippage_bps) {
                 return l.swap(wallet, pool, token_in, amount_in, max_slippage_bps);
             },
             py::arg("wallet"), py::arg("pool_id"), py::arg("token_in"), py::arg("amount_in"),
             py::arg("max_slippage_bps") = kDefaultSlippageBps)
        .def("reserves", [](const Ledger& l, const std::string& id) {
            const auto p = l.pool(id);
            if (!p) throw Error(ErrorCode::UnknownPool, id);
            return std::make_pair(p->reserve_a, p->reserve_b);
        })
        .def("digest", &Ledger::digest);

    py::class_<PyAgent>(m, "_Agent")
        .def(py::init<const std::string&, const std::string&, const std::map<std::string, std::string>&,
                      const std::string&, const std::string&, std::int64_t>())
        .def_property_readonly("agent_id", &PyAgent::agent_id)
        .def("send", &PyAgent::send)
        .def("memories", &PyAgent::memories)
        .def("balances", &PyAgent::balances_of_agent);

    m.def("majority_vote", &majority_vote);
    m.def("normalize_answer", [](const std::string& s) { return normalize_answer(s); });
    m.def("run_basic_suite", [](const std::string& character, const std::string& script, const std::string& genesis,
                                const std::string& fixtures) {
        auto cfg = load_bench_config(character, script, genesis, fixtures);
        BenchReport report;
        {
            py::gil_scoped_release release;
            report = run_basic_suite(cfg);
        }
        auto out = report.to_json();
        out["digest"] = report.canonical_digest();
        return out.dump();
    });
}
