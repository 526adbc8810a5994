#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "agentos/error.hpp"
#include "agentos/ledger.hpp"
#include "agentos/runtime.hpp"
#include "agentos/util.hpp"

namespace agentos {

namespace {

using LedgerPtr = std::shared_ptr<Ledger>;

TrustWeights trust_weights(const Runtime& runtime) {
    TrustWeights w;
    if (auto v = runtime.get_setting("TRUST_W_RISK")) w.risk = std::stod(*v);
    if (auto v = runtime.get_setting("TRUST_W_CONSISTENCY")) w.consistency = std::stod(*v);
    return w;
}

std::int64_t slippage_bps(const Runtime& runtime) {
    if (auto v = runtime.get_setting("SLIPPAGE"); v && !v->empty()) return std::stoll(*v);
    return kDefaultSlippageBps;
}

std::string agent_wallet(const Ledger& ledger, const Runtime& runtime) {
    auto wallet = ledger.wallet_of(runtime.agent_id());
    if (!wallet) throw Error(ErrorCode::UnknownWallet, "agent " + runtime.agent_id() + " has no wallet");
    return *wallet;
}

/// The non-native side of a swap is the token being judged.
std::string target_token(const Ledger& ledger, const SwapRequest& req) {
    return req.token_in == ledger.native_token() ? req.token_out : req.token_in;
}

std::optional<double> swap_trust(const Ledger& ledger, const Runtime& runtime, const MemoryRecord& message,
                                 const SwapRequest& req) {
    auto perf = ledger.performance(target_token(ledger, req));
    if (!perf) return std::nullopt;
    return calculate_trust_score(*perf, ledger.metrics(message.user_id), trust_weights(runtime));
}

Content text_reply(std::string text) {
    Content c;
    c.text = std::move(text);
    return c;
}

ActionDef create_wallet_action(LedgerPtr ledger) {
    ActionDef a;
    a.name = "CREATE_WALLET";
    a.similes = {"NEW_WALLET", "OPEN_WALLET", "MAKE_WALLET"};
    a.description = "Create a new wallet address for the agent on the chain.";
    a.handler = [ledger](Runtime& runtime, const MemoryRecord&, const State&, const ActionOptions&,
                         ReplySink& sink) {
        const auto salt = runtime.get_setting("WALLET_SECRET_SALT").value_or(runtime.agent_id());
        const auto address = ledger->create_wallet(salt);
        if (!ledger->wallet_of(runtime.agent_id())) ledger->bind_agent(runtime.agent_id(), address);
        sink.reply(text_reply("Created wallet " + address));
        return true;
    };
    return a;
}

ActionDef wallet_balance_action(LedgerPtr ledger) {
    ActionDef a;
    a.name = "WALLET_BALANCE";
    a.similes = {"CHECK_BALANCE", "GET_BALANCE"};
    a.description = "Report the tokens held in the agent wallet and their value.";
    a.validate = [ledger](Runtime& runtime, const MemoryRecord&) {
        return ledger->wallet_of(runtime.agent_id()).has_value();
    };
    a.handler = [ledger](Runtime& runtime, const MemoryRecord&, const State&, const ActionOptions&,
                         ReplySink& sink) {
        const auto wallet = agent_wallet(*ledger, runtime);
        std::vector<std::string> parts;
        for (const auto& [token, amount] : ledger->balances(wallet)) {
            parts.push_back(format_amount(amount) + " " + token);
        }
        const auto portfolio = ledger->fetch_portfolio_value(wallet);
        sink.reply(text_reply(fmt::format("Wallet {} holds {} (${:.2f})", wallet,
                                          parts.empty() ? std::string("nothing") : join(parts, ", "),
                                          portfolio.total_usd)));
        return true;
    };
    return a;
}

ActionDef transfer_action(LedgerPtr ledger) {
    ActionDef a;
    a.name = "TRANSFER_TOKEN";
    a.similes = {"SEND_TOKEN", "SEND_TOKENS", "TRANSFER_TOKENS"};
    a.description = "Send or transfer tokens to another wallet.";
    a.handler = [ledger](Runtime& runtime, const MemoryRecord& message, const State&, const ActionOptions&,
                         ReplySink& sink) {
        auto req = parse_transfer_request(message.content.text);
        if (!req) throw Error(ErrorCode::InvalidArgument, "expected '<amount> <token> to <address>'");
        const auto wallet = agent_wallet(*ledger, runtime);
        ledger->transfer(wallet, req->to, req->token, req->amount);
        sink.reply(text_reply("Transferred " + format_amount(req->amount) + " " + req->token + " to " + req->to));
        return true;
    };
    return a;
}

ActionDef contract_call_action(LedgerPtr ledger) {
    ActionDef a;
    a.name = "CONTRACT_CALL";
    a.similes = {"ADD_LIQUIDITY", "CALL_CONTRACT"};
    a.description = "Call the pool contract to deposit liquidity from the agent wallet.";
    a.handler = [ledger](Runtime& runtime, const MemoryRecord& message, const State&, const ActionOptions&,
                         ReplySink& sink) {
        auto req = parse_liquidity_request(message.content.text);
        if (!req) throw Error(ErrorCode::InvalidArgument, "expected '<amount> <token> ... pool <id>'");
        const auto wallet = agent_wallet(*ledger, runtime);
        const auto pool = ledger->pool(req->pool_id);
        if (!pool) throw Error(ErrorCode::UnknownPool, req->pool_id);
        const auto counterpart = ledger->add_liquidity(wallet, req->pool_id, req->token, req->amount);
        const auto& other = req->token == pool->token_a ? pool->token_b : pool->token_a;
        sink.reply(text_reply("Added " + format_amount(req->amount) + " " + req->token + " and " +
                              format_amount(counterpart) + " " + other + " to pool " + req->pool_id));
        return true;
    };
    return a;
}

ActionDef execute_swap_action(LedgerPtr ledger) {
    ActionDef a;
    a.name = "EXECUTE_SWAP";
    a.similes = {"SWAP_TOKENS", "TOKEN_SWAP", "TRADE_TOKENS"};
    a.description = "Swap or trade one token for another token.";
    a.validate = [ledger](Runtime& runtime, const MemoryRecord& message) {
        auto req = parse_swap_request(message.content.text);
        // Unparsable requests go through so the handler can report the problem.
        if (!req) return true;
        auto trust = swap_trust(*ledger, runtime, message, *req);
        return trust && *trust >= runtime.minimum_trust_threshold();
    };
    a.handler = [ledger](Runtime& runtime, const MemoryRecord& message, const State&, const ActionOptions&,
                         ReplySink& sink) {
        auto req = parse_swap_request(message.content.text);
        if (!req) throw Error(ErrorCode::InvalidArgument, "expected 'swap <amount> <token> for <token>'");
        auto trust = swap_trust(*ledger, runtime, message, *req);
        if (!trust) throw Error(ErrorCode::UnknownToken, "no performance data for " + target_token(*ledger, *req));
        if (*trust < runtime.minimum_trust_threshold()) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("trust {:.1f} below threshold", *trust));
        }
        const auto wallet = agent_wallet(*ledger, runtime);
        const auto pool = ledger->find_pool(req->token_in, req->token_out);
        if (!pool) throw Error(ErrorCode::UnknownPool, req->token_in + "/" + req->token_out);
        const auto out = ledger->swap(wallet, pool->id, req->token_in, req->amount, slippage_bps(runtime), *trust);
        sink.reply(text_reply(fmt::format("Swapped {} {} for {} {} (trust {:.1f})", format_amount(req->amount),
                                          req->token_in, format_amount(out), req->token_out, *trust)));
        return true;
    };
    return a;
}

ActionDef take_order_action() {
    ActionDef a;
    a.name = "TAKE_ORDER";
    a.similes = {"PLACE_ORDER", "LIMIT_ORDER"};
    a.description = "Record a limit order intent for later; no matching happens.";
    a.handler = [](Runtime& runtime, const MemoryRecord& message, const State&, const ActionOptions&,
                   ReplySink& sink) {
        runtime.remember(message.room_id, text_reply("Order intent from " + message.user_id + ": " +
                                                     std::string(trim(message.content.text))),
                         MemoryKind::Fact);
        sink.reply(text_reply("Order recorded"));
        return true;
    };
    return a;
}

ActionDef disabled_action(std::string name, std::vector<std::string> similes, std::string description) {
    ActionDef a;
    a.name = std::move(name);
    a.similes = std::move(similes);
    a.description = std::move(description);
    a.validate = [](Runtime&, const MemoryRecord&) { return false; };
    a.handler = [](Runtime&, const MemoryRecord&, const State&, const ActionOptions&, ReplySink&) {
        return false;
    };
    return a;
}

ProviderDef wallet_provider(LedgerPtr ledger) {
    return {"wallet", [ledger](const Runtime& runtime, const MemoryRecord&, const State&) {
                auto wallet = ledger->wallet_of(runtime.agent_id());
                if (!wallet) return std::string();
                const auto p = ledger->fetch_portfolio_value(*wallet);
                std::string out = fmt::format("Wallet {}: ${:.2f} ({:.4f} {})", *wallet, p.total_usd,
                                              p.total_native, ledger->native_token());
                for (const auto& item : p.items) {
                    out += fmt::format("\n{}: {} (${:.2f}{})", item.token, item.amount, item.value_usd,
                                       item.priced ? "" : ", unpriced");
                }
                return out;
            }};
}

ProviderDef trust_score_provider(LedgerPtr ledger) {
    return {"trustScore", [ledger](const Runtime& runtime, const MemoryRecord& message, const State&) {
                auto req = parse_swap_request(message.content.text);
                if (!req) return std::string();
                auto trust = swap_trust(*ledger, runtime, message, *req);
                if (!trust) return std::string();
                return fmt::format("Trust score for {}: {:.1f} (minimum {:.1f})", target_token(*ledger, *req),
                                   *trust, runtime.minimum_trust_threshold());
            }};
}

} // namespace

PluginDef ledger_plugin(std::shared_ptr<Ledger> ledger) {
    if (!ledger) throw Error(ErrorCode::InvalidArgument, "ledger plugin needs a ledger");
    PluginDef p;
    p.name = "ledger";
    p.description = "Simulated chain: wallets, transfers, pools, trust-gated swaps.";
    p.actions = {
        execute_swap_action(ledger),
        disabled_action("PUMPFUN", {"CREATE_AND_BUY_TOKEN"}, "Launch a token on a bonding curve (not available)."),
        disabled_action("FOMO", {}, "Launch a token on a fair-launch venue (not available)."),
        transfer_action(ledger),
        disabled_action("EXECUTE_SWAP_DAO", {"EXECUTE_SWAP_FOR_DAO"}, "Swap on behalf of a DAO (not available)."),
        take_order_action(),
        create_wallet_action(ledger),
        wallet_balance_action(ledger),
        contract_call_action(ledger),
    };
    p.providers = {wallet_provider(ledger), trust_score_provider(ledger)};
    return p;
}

} // namespace agentos
