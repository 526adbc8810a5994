#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentos/character.hpp"
#include "agentos/components.hpp"

namespace agentos {

/// Base units per whole token.
inline constexpr std::int64_t kScale = 1'000'000'000;
inline constexpr std::int64_t kDefaultFeeBps = 30;
inline constexpr std::int64_t kDefaultSlippageBps = 100;

using Amount = std::int64_t;

/// "12.5" -> 12'500'000'000. Rejects signs, exponents and more than nine decimals.
std::optional<Amount> parse_amount(std::string_view text);
/// Inverse of parse_amount, without trailing zeros.
std::string format_amount(Amount amount);
double to_units(Amount amount);

struct Pool {
    std::string id;
    std::string token_a; // native
    std::string token_b;
    Amount reserve_a = 0;
    Amount reserve_b = 0;

    bool operator==(const Pool&) const = default;
};

struct TokenPerformance {
    std::string token;
    double liquidity_usd = 0.0;
    double volatility = 0.0;
    double holder_concentration = 0.0;
    double price_change_24h = 0.0;
};

struct RecommenderMetrics {
    std::string recommender_id;
    std::int64_t total_recommendations = 0;
    std::int64_t successful = 0;
};

struct PortfolioItem {
    std::string token;
    double amount = 0.0;
    double value_usd = 0.0;
    bool priced = true;
};

struct WalletPortfolio {
    double total_usd = 0.0;
    double total_native = 0.0;
    std::vector<PortfolioItem> items;
};

struct BuyAmounts {
    double none = 0.0;
    double low = 0.0;
    double medium = 0.0;
    double high = 0.0;
};

struct TrustWeights {
    double risk = 0.6;
    double consistency = 0.4;
};

double calculate_risk_score(const TokenPerformance& perf);
double calculate_consistency_score(const TokenPerformance& perf, const RecommenderMetrics& metrics);
double calculate_trust_score(const TokenPerformance& perf, const RecommenderMetrics& metrics,
                             const TrustWeights& weights = {});

/// Tiers at 0.1% / 0.5% / 1% of liquidity, in native units.
BuyAmounts buy_amounts_for_liquidity(double liquidity_usd, double native_price_usd);

/// Required plugin settings; one violation per missing or empty key.
std::vector<Violation> validate_env(const std::map<std::string, std::string>& settings);

struct SwapLogEntry {
    std::string wallet;
    std::string pool_id;
    std::string token_in;
    Amount amount_in = 0;
    Amount amount_out = 0;
    std::optional<double> trust;
};

/// Simulated chain. Every public operation takes the ledger lock, so each one
/// is a single atomic transaction. Failed operations leave no trace.
class Ledger {
public:
    explicit Ledger(std::string native_token = "SOL", double native_price_usd = 100.0,
                    std::int64_t fee_bps = kDefaultFeeBps);

    /// {"nativeToken","nativePriceUsd","feeBps","wallets":[addr],
    ///  "mints":[{"wallet","token","amount"}],"pools":[{"id","tokenA","tokenB","reserveA","reserveB"}]}
    /// Amounts are decimal strings or numbers in whole units.
    static std::unique_ptr<Ledger> from_genesis(const nlohmann::json& doc);
    static std::unique_ptr<Ledger> load_genesis(const std::filesystem::path& path);

    /// JSON array of performance rows (have "token") and metrics rows (have "recommenderId").
    void load_fixtures(const nlohmann::json& rows);
    void load_fixtures(const std::filesystem::path& path);

    std::string create_wallet(std::string_view salt);
    void add_wallet(const std::string& address);
    bool has_wallet(const std::string& address) const;
    std::vector<std::string> wallets() const;

    /// Fixture-only supply creation.
    void mint(const std::string& address, const std::string& token, Amount amount);
    void create_pool(Pool pool);

    Amount balance(const std::string& address, const std::string& token) const;
    std::map<std::string, Amount> balances(const std::string& address) const;
    std::optional<Pool> pool(const std::string& id) const;
    std::vector<Pool> pools() const;
    /// First pool (by id) that pairs the two tokens, in either order.
    std::optional<Pool> find_pool(const std::string& x, const std::string& y) const;

    void transfer(const std::string& from, const std::string& to, const std::string& token, Amount amount);

    /// Output amount for `amount_in` of `token_in`, fee applied, no mutation.
    Amount quote(const std::string& pool_id, const std::string& token_in, Amount amount_in) const;
    Amount swap(const std::string& wallet, const std::string& pool_id, const std::string& token_in,
                Amount amount_in, std::int64_t max_slippage_bps, std::optional<double> trust = std::nullopt);

    /// Deposits `amount` of `token` and the matching amount of the other side
    /// at the current reserve ratio. Returns the counterpart amount.
    Amount add_liquidity(const std::string& wallet, const std::string& pool_id, const std::string& token,
                         Amount amount);

    /// Native value of one whole token; nullopt when no pool prices it.
    std::optional<double> price_in_native(const std::string& token) const;
    WalletPortfolio fetch_portfolio_value(const std::string& wallet) const;
    double liquidity_usd(const std::string& token) const;
    BuyAmounts calculate_buy_amounts(const std::string& token) const;

    std::optional<TokenPerformance> performance(const std::string& token) const;
    RecommenderMetrics metrics(const std::string& recommender_id) const;
    void set_performance(TokenPerformance perf);
    void set_metrics(RecommenderMetrics metrics);

    /// Per-token sum over wallets and pool reserves.
    std::map<std::string, Amount> total_supply() const;
    /// What has been minted, including initial pool reserves.
    std::map<std::string, Amount> minted_supply() const;

    std::vector<SwapLogEntry> swap_log() const;

    void bind_agent(const std::string& agent_id, const std::string& address);
    std::optional<std::string> wallet_of(const std::string& agent_id) const;

    /// SHA-256 over wallets, pools, fee and price. Logs and fixtures excluded.
    std::string digest() const;

    const std::string& native_token() const noexcept { return native_token_; }
    double native_price_usd() const noexcept { return native_price_usd_; }
    std::int64_t fee_bps() const noexcept { return fee_bps_; }

private:
    Amount quote_locked(const Pool& pool, const std::string& token_in, Amount amount_in) const;
    std::optional<double> price_locked(const std::string& token) const;
    const Pool& pool_locked(const std::string& id) const;

    mutable std::mutex mutex_;
    std::string native_token_;
    double native_price_usd_;
    std::int64_t fee_bps_;
    std::uint64_t wallet_counter_ = 0;
    std::map<std::string, std::map<std::string, Amount>> wallets_;
    std::map<std::string, Pool> pools_;
    std::map<std::string, Amount> minted_;
    std::map<std::string, TokenPerformance> performance_;
    std::map<std::string, RecommenderMetrics> metrics_;
    std::map<std::string, std::string> agent_wallets_;
    std::vector<SwapLogEntry> swap_log_;
};

/// Wallet, transfer, contract-call, swap and order actions with wallet and
/// trust-score providers, all bound to `ledger`.
PluginDef ledger_plugin(std::shared_ptr<Ledger> ledger);

/// Parses "swap <amount> <token_in> for <token_out>" (also "into", "to").
struct SwapRequest {
    Amount amount = 0;
    std::string token_in;
    std::string token_out;
};
std::optional<SwapRequest> parse_swap_request(std::string_view text);

/// Parses "<amount> <token> to <address>".
struct TransferRequest {
    Amount amount = 0;
    std::string token;
    std::string to;
};
std::optional<TransferRequest> parse_transfer_request(std::string_view text);

/// Parses "<amount> <token> ... pool <pool_id>".
struct LiquidityRequest {
    Amount amount = 0;
    std::string token;
    std::string pool_id;
};
std::optional<LiquidityRequest> parse_liquidity_request(std::string_view text);

} // namespace agentos
