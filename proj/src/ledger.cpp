#include "agentos/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>

#include "agentos/error.hpp"
#include "agentos/util.hpp"

namespace agentos {

using nlohmann::json;

namespace {

using Wide = __int128;

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

Amount checked_add(Amount a, Amount b) {
    Amount out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw Error(ErrorCode::InvalidArgument, "amount overflow");
    return out;
}

Amount amount_from_json(const json& v, const std::string& where) {
    std::optional<Amount> parsed;
    if (v.is_string()) {
        parsed = parse_amount(v.get<std::string>());
    } else if (v.is_number_integer() || v.is_number_unsigned()) {
        const auto whole = v.get<std::int64_t>();
        if (whole >= 0 && whole <= std::numeric_limits<Amount>::max() / kScale) parsed = whole * kScale;
    } else if (v.is_number_float()) {
        parsed = parse_amount(v.dump());
    }
    if (!parsed) throw Error(ErrorCode::SchemaViolation, where + ": invalid amount " + v.dump());
    return *parsed;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedJson, path.string() + ": " + e.what());
    }
}

} // namespace

std::optional<Amount> parse_amount(std::string_view text) {
    static const std::regex re(R"(^(\d+)(?:\.(\d{1,9}))?$)");
    const std::string s(trim(text));
    std::smatch m;
    if (!std::regex_match(s, m, re)) return std::nullopt;
    const std::string whole = m[1].str();
    std::string frac = m[2].str();
    frac.resize(9, '0');
    Wide value = 0;
    for (char c : whole) {
        value = value * 10 + (c - '0');
        if (value > std::numeric_limits<Amount>::max()) return std::nullopt;
    }
    value *= kScale;
    value += std::stoll(frac);
    if (value > std::numeric_limits<Amount>::max()) return std::nullopt;
    return static_cast<Amount>(value);
}

std::string format_amount(Amount amount) {
    const bool negative = amount < 0;
    const Wide abs = negative ? -static_cast<Wide>(amount) : static_cast<Wide>(amount);
    const auto whole = static_cast<std::uint64_t>(abs / kScale);
    const auto frac = static_cast<std::uint64_t>(abs % kScale);
    std::string out = (negative ? "-" : "") + std::to_string(whole);
    if (frac != 0) {
        std::string f = std::to_string(frac);
        f.insert(0, 9 - f.size(), '0');
        while (f.back() == '0') f.pop_back();
        out += "." + f;
    }
    return out;
}

double to_units(Amount amount) {
    return static_cast<double>(amount / kScale) + static_cast<double>(amount % kScale) / kScale;
}

double calculate_risk_score(const TokenPerformance& perf) {
    const double liquidity = std::min(perf.liquidity_usd / 1'000'000.0, 1.0);
    const double risk = 0.4 * perf.volatility + 0.4 * perf.holder_concentration + 0.2 * (1.0 - liquidity);
    return std::clamp(risk, 0.0, 1.0);
}

double calculate_consistency_score(const TokenPerformance&, const RecommenderMetrics& metrics) {
    if (metrics.total_recommendations <= 0) return 0.0;
    const auto total = static_cast<double>(metrics.total_recommendations);
    const double success_rate = static_cast<double>(metrics.successful) / total;
    return success_rate * total / (total + 5.0);
}

double calculate_trust_score(const TokenPerformance& perf, const RecommenderMetrics& metrics,
                             const TrustWeights& weights) {
    const double risk = calculate_risk_score(perf);
    const double consistency = calculate_consistency_score(perf, metrics);
    return 100.0 * (weights.risk * (1.0 - risk) + weights.consistency * consistency);
}

BuyAmounts buy_amounts_for_liquidity(double liquidity_usd, double native_price_usd) {
    BuyAmounts out;
    if (liquidity_usd <= 0.0 || native_price_usd <= 0.0) return out;
    out.low = liquidity_usd * 10.0 / 10000.0 / native_price_usd;
    out.medium = liquidity_usd * 50.0 / 10000.0 / native_price_usd;
    out.high = liquidity_usd * 100.0 / 10000.0 / native_price_usd;
    return out;
}

std::vector<Violation> validate_env(const std::map<std::string, std::string>& settings) {
    static const std::vector<std::pair<std::string, std::string>> required = {
        {"SOL_ADDRESS", "SOL address is required"},
        {"SLIPPAGE", "Slippage is required"},
        {"RPC_URL", "RPC URL is required"},
        {"HELIUS_API_KEY", "Helius API key is required"},
        {"BIRDEYE_API_KEY", "Birdeye API key is required"},
    };
    std::vector<Violation> out;
    for (const auto& [key, message] : required) {
        auto it = settings.find(key);
        if (it == settings.end() || it->second.empty()) out.push_back({key, message});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ledger

Ledger::Ledger(std::string native_token, double native_price_usd, std::int64_t fee_bps)
    : native_token_(upper(native_token)), native_price_usd_(native_price_usd), fee_bps_(fee_bps) {
    if (native_token_.empty()) throw Error(ErrorCode::InvalidArgument, "native token must not be empty");
    if (!(native_price_usd_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "native price must be positive");
    if (fee_bps_ < 0 || fee_bps_ >= 10000) throw Error(ErrorCode::InvalidArgument, "fee_bps out of range");
}

std::unique_ptr<Ledger> Ledger::from_genesis(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, "genesis must be an object");
    auto ledger = std::make_unique<Ledger>(doc.value("nativeToken", std::string("SOL")),
                                           doc.value("nativePriceUsd", 100.0),
                                           doc.value("feeBps", kDefaultFeeBps));
    for (const auto& w : doc.value("wallets", json::array())) {
        ledger->add_wallet(w.is_object() ? w.at("address").get<std::string>() : w.get<std::string>());
    }
    for (const auto& m : doc.value("mints", json::array())) {
        const auto wallet = m.at("wallet").get<std::string>();
        if (!ledger->has_wallet(wallet)) ledger->add_wallet(wallet);
        ledger->mint(wallet, m.at("token").get<std::string>(), amount_from_json(m.at("amount"), "mints"));
    }
    for (const auto& p : doc.value("pools", json::array())) {
        Pool pool;
        pool.id = p.at("id").get<std::string>();
        pool.token_a = p.value("tokenA", ledger->native_token());
        pool.token_b = p.at("tokenB").get<std::string>();
        pool.reserve_a = amount_from_json(p.at("reserveA"), "pools");
        pool.reserve_b = amount_from_json(p.at("reserveB"), "pools");
        ledger->create_pool(std::move(pool));
    }
    return ledger;
}

std::unique_ptr<Ledger> Ledger::load_genesis(const std::filesystem::path& path) {
    const auto doc = read_json_file(path);
    try {
        return from_genesis(doc);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
    }
}

void Ledger::load_fixtures(const json& rows) {
    if (!rows.is_array()) throw Error(ErrorCode::SchemaViolation, "fixtures must be an array");
    std::vector<TokenPerformance> perfs;
    std::vector<RecommenderMetrics> metrics;
    try {
        for (const auto& row : rows) {
            if (row.contains("token")) {
                TokenPerformance p;
                p.token = upper(row.at("token").get<std::string>());
                p.liquidity_usd = row.value("liquidityUsd", 0.0);
                p.volatility = row.value("volatility", 0.0);
                p.holder_concentration = row.value("holderConcentration", 0.0);
                p.price_change_24h = row.value("priceChange24h", 0.0);
                if (p.liquidity_usd < 0.0 || p.volatility < 0.0 || p.volatility > 1.0 ||
                    p.holder_concentration < 0.0 || p.holder_concentration > 1.0) {
                    throw Error(ErrorCode::SchemaViolation, "performance row out of range: " + row.dump());
                }
                perfs.push_back(std::move(p));
            } else if (row.contains("recommenderId")) {
                RecommenderMetrics m;
                m.recommender_id = row.at("recommenderId").get<std::string>();
                m.total_recommendations = row.value("totalRecommendations", std::int64_t{0});
                m.successful = row.value("successful", std::int64_t{0});
                if (m.total_recommendations < 0 || m.successful < 0 || m.successful > m.total_recommendations) {
                    throw Error(ErrorCode::SchemaViolation, "metrics row out of range: " + row.dump());
                }
                metrics.push_back(std::move(m));
            } else {
                throw Error(ErrorCode::SchemaViolation, "unrecognized fixture row: " + row.dump());
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, e.what());
    }
    for (auto& p : perfs) set_performance(std::move(p));
    for (auto& m : metrics) set_metrics(std::move(m));
}

void Ledger::load_fixtures(const std::filesystem::path& path) {
    load_fixtures(read_json_file(path));
}

std::string Ledger::create_wallet(std::string_view salt) {
    std::lock_guard lock(mutex_);
    for (;;) {
        const auto n = wallet_counter_++;
        std::string address = "sim:" + to_hex(stable_hash64(std::string(salt) + ":" + std::to_string(n)));
        if (wallets_.contains(address)) continue;
        wallets_.emplace(address, std::map<std::string, Amount>{});
        return address;
    }
}

void Ledger::add_wallet(const std::string& address) {
    std::lock_guard lock(mutex_);
    if (trim(address).empty()) throw Error(ErrorCode::InvalidArgument, "wallet address must not be empty");
    if (!wallets_.emplace(address, std::map<std::string, Amount>{}).second) {
        throw Error(ErrorCode::DuplicateId, "wallet " + address);
    }
}

bool Ledger::has_wallet(const std::string& address) const {
    std::lock_guard lock(mutex_);
    return wallets_.contains(address);
}

std::vector<std::string> Ledger::wallets() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [address, _] : wallets_) out.push_back(address);
    return out;
}

void Ledger::mint(const std::string& address, const std::string& token, Amount amount) {
    std::lock_guard lock(mutex_);
    if (amount <= 0) throw Error(ErrorCode::InvalidArgument, "mint amount must be positive");
    auto it = wallets_.find(address);
    if (it == wallets_.end()) throw Error(ErrorCode::UnknownWallet, address);
    const auto symbol = upper(token);
    const Amount minted = checked_add(minted_[symbol], amount);
    it->second[symbol] = checked_add(it->second[symbol], amount);
    minted_[symbol] = minted;
}

void Ledger::create_pool(Pool pool) {
    std::lock_guard lock(mutex_);
    pool.token_a = upper(pool.token_a);
    pool.token_b = upper(pool.token_b);
    if (pool.id.empty()) throw Error(ErrorCode::InvalidArgument, "pool id must not be empty");
    if (pools_.contains(pool.id)) throw Error(ErrorCode::DuplicateId, "pool " + pool.id);
    if (pool.token_a != native_token_) {
        throw Error(ErrorCode::InvalidArgument, "pool token_a must be the native token");
    }
    if (pool.token_b == pool.token_a) throw Error(ErrorCode::InvalidArgument, "pool tokens must differ");
    if (pool.reserve_a <= 0 || pool.reserve_b <= 0) {
        throw Error(ErrorCode::InvalidArgument, "pool reserves must be positive");
    }
    const Amount ma = checked_add(minted_[pool.token_a], pool.reserve_a);
    const Amount mb = checked_add(minted_[pool.token_b], pool.reserve_b);
    minted_[pool.token_a] = ma;
    minted_[pool.token_b] = mb;
    pools_.emplace(pool.id, std::move(pool));
}

Amount Ledger::balance(const std::string& address, const std::string& token) const {
    std::lock_guard lock(mutex_);
    auto it = wallets_.find(address);
    if (it == wallets_.end()) throw Error(ErrorCode::UnknownWallet, address);
    auto t = it->second.find(upper(token));
    return t == it->second.end() ? 0 : t->second;
}

std::map<std::string, Amount> Ledger::balances(const std::string& address) const {
    std::lock_guard lock(mutex_);
    auto it = wallets_.find(address);
    if (it == wallets_.end()) throw Error(ErrorCode::UnknownWallet, address);
    std::map<std::string, Amount> out;
    for (const auto& [token, amount] : it->second) {
        if (amount != 0) out.emplace(token, amount);
    }
    return out;
}

std::optional<Pool> Ledger::pool(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = pools_.find(id);
    if (it == pools_.end()) return std::nullopt;
    return it->second;
}

std::vector<Pool> Ledger::pools() const {
    std::lock_guard lock(mutex_);
    std::vector<Pool> out;
    for (const auto& [id, p] : pools_) out.push_back(p);
    return out;
}

std::optional<Pool> Ledger::find_pool(const std::string& x, const std::string& y) const {
    std::lock_guard lock(mutex_);
    const auto a = upper(x);
    const auto b = upper(y);
    for (const auto& [id, p] : pools_) {
        if ((p.token_a == a && p.token_b == b) || (p.token_a == b && p.token_b == a)) return p;
    }
    return std::nullopt;
}

const Pool& Ledger::pool_locked(const std::string& id) const {
    auto it = pools_.find(id);
    if (it == pools_.end()) throw Error(ErrorCode::UnknownPool, id);
    return it->second;
}

void Ledger::transfer(const std::string& from, const std::string& to, const std::string& token, Amount amount) {
    std::lock_guard lock(mutex_);
    if (amount <= 0) throw Error(ErrorCode::InvalidArgument, "transfer amount must be positive");
    auto src = wallets_.find(from);
    if (src == wallets_.end()) throw Error(ErrorCode::UnknownWallet, from);
    auto dst = wallets_.find(to);
    if (dst == wallets_.end()) throw Error(ErrorCode::UnknownWallet, to);
    const auto symbol = upper(token);
    const Amount have = src->second.contains(symbol) ? src->second.at(symbol) : 0;
    if (have < amount) {
        throw Error(ErrorCode::InsufficientFunds,
                    from + " holds " + format_amount(have) + " " + symbol + ", needs " + format_amount(amount));
    }
    if (from == to) return;
    const Amount credited = checked_add(dst->second[symbol], amount);
    src->second[symbol] = have - amount;
    dst->second[symbol] = credited;
}

Amount Ledger::quote_locked(const Pool& pool, const std::string& token_in, Amount amount_in) const {
    if (amount_in <= 0) throw Error(ErrorCode::InvalidArgument, "swap amount must be positive");
    const auto symbol = upper(token_in);
    Amount reserve_in = 0;
    Amount reserve_out = 0;
    if (symbol == pool.token_a) {
        reserve_in = pool.reserve_a;
        reserve_out = pool.reserve_b;
    } else if (symbol == pool.token_b) {
        reserve_in = pool.reserve_b;
        reserve_out = pool.reserve_a;
    } else {
        throw Error(ErrorCode::UnknownToken, symbol + " is not in pool " + pool.id);
    }
    const Wide effective_in = static_cast<Wide>(amount_in) * (10000 - fee_bps_) / 10000;
    const Wide out = static_cast<Wide>(reserve_out) * effective_in / (static_cast<Wide>(reserve_in) + effective_in);
    return static_cast<Amount>(out);
}

Amount Ledger::quote(const std::string& pool_id, const std::string& token_in, Amount amount_in) const {
    std::lock_guard lock(mutex_);
    return quote_locked(pool_locked(pool_id), token_in, amount_in);
}

Amount Ledger::swap(const std::string& wallet, const std::string& pool_id, const std::string& token_in,
                    Amount amount_in, std::int64_t max_slippage_bps, std::optional<double> trust) {
    std::lock_guard lock(mutex_);
    if (amount_in <= 0) throw Error(ErrorCode::InvalidArgument, "swap amount must be positive");
    if (max_slippage_bps < 0) throw Error(ErrorCode::InvalidArgument, "slippage must not be negative");
    auto w = wallets_.find(wallet);
    if (w == wallets_.end()) throw Error(ErrorCode::UnknownWallet, wallet);
    auto p = pools_.find(pool_id);
    if (p == pools_.end()) throw Error(ErrorCode::UnknownPool, pool_id);
    Pool& pool = p->second;

    const auto in_symbol = upper(token_in);
    const Amount amount_out = quote_locked(pool, in_symbol, amount_in);
    const bool a_to_b = in_symbol == pool.token_a;
    const auto& out_symbol = a_to_b ? pool.token_b : pool.token_a;
    const Amount reserve_in = a_to_b ? pool.reserve_a : pool.reserve_b;
    const Amount reserve_out = a_to_b ? pool.reserve_b : pool.reserve_a;

    const Amount have = w->second.contains(in_symbol) ? w->second.at(in_symbol) : 0;
    if (have < amount_in) {
        throw Error(ErrorCode::InsufficientFunds,
                    wallet + " holds " + format_amount(have) + " " + in_symbol + ", needs " + format_amount(amount_in));
    }

    // Realized price out/in against the spot mid-price reserve_out/reserve_in.
    const long double spot = static_cast<long double>(reserve_out) / static_cast<long double>(reserve_in);
    const long double realized = static_cast<long double>(amount_out) / static_cast<long double>(amount_in);
    const long double deviation_bps = (1.0L - realized / spot) * 10000.0L;
    if (deviation_bps > static_cast<long double>(max_slippage_bps)) {
        throw Error(ErrorCode::SlippageExceeded,
                    "price moved " + std::to_string(static_cast<double>(deviation_bps)) + " bps, limit " +
                        std::to_string(max_slippage_bps));
    }

    const Amount credited = checked_add(w->second[out_symbol], amount_out);
    const Amount new_reserve_in = checked_add(reserve_in, amount_in);
    w->second[in_symbol] = have - amount_in;
    w->second[out_symbol] = credited;
    if (a_to_b) {
        pool.reserve_a = new_reserve_in;
        pool.reserve_b -= amount_out;
    } else {
        pool.reserve_b = new_reserve_in;
        pool.reserve_a -= amount_out;
    }
    swap_log_.push_back({wallet, pool_id, in_symbol, amount_in, amount_out, trust});
    return amount_out;
}

Amount Ledger::add_liquidity(const std::string& wallet, const std::string& pool_id, const std::string& token,
                             Amount amount) {
    std::lock_guard lock(mutex_);
    if (amount <= 0) throw Error(ErrorCode::InvalidArgument, "liquidity amount must be positive");
    auto w = wallets_.find(wallet);
    if (w == wallets_.end()) throw Error(ErrorCode::UnknownWallet, wallet);
    auto p = pools_.find(pool_id);
    if (p == pools_.end()) throw Error(ErrorCode::UnknownPool, pool_id);
    Pool& pool = p->second;

    const auto symbol = upper(token);
    if (symbol != pool.token_a && symbol != pool.token_b) {
        throw Error(ErrorCode::UnknownToken, symbol + " is not in pool " + pool.id);
    }
    const bool side_a = symbol == pool.token_a;
    const Amount own_reserve = side_a ? pool.reserve_a : pool.reserve_b;
    const Amount other_reserve = side_a ? pool.reserve_b : pool.reserve_a;
    const auto& other_symbol = side_a ? pool.token_b : pool.token_a;
    const Wide counterpart_wide = static_cast<Wide>(amount) * other_reserve / own_reserve;
    if (counterpart_wide > std::numeric_limits<Amount>::max()) {
        throw Error(ErrorCode::InvalidArgument, "liquidity amount too large");
    }
    const auto counterpart = static_cast<Amount>(counterpart_wide);

    const Amount have_own = w->second.contains(symbol) ? w->second.at(symbol) : 0;
    const Amount have_other = w->second.contains(other_symbol) ? w->second.at(other_symbol) : 0;
    if (have_own < amount) {
        throw Error(ErrorCode::InsufficientFunds, wallet + " lacks " + format_amount(amount) + " " + symbol);
    }
    if (have_other < counterpart) {
        throw Error(ErrorCode::InsufficientFunds,
                    wallet + " lacks " + format_amount(counterpart) + " " + other_symbol);
    }
    const Amount new_own = checked_add(own_reserve, amount);
    const Amount new_other = checked_add(other_reserve, counterpart);
    w->second[symbol] = have_own - amount;
    w->second[other_symbol] = have_other - counterpart;
    (side_a ? pool.reserve_a : pool.reserve_b) = new_own;
    (side_a ? pool.reserve_b : pool.reserve_a) = new_other;
    return counterpart;
}

std::optional<double> Ledger::price_locked(const std::string& token) const {
    const auto symbol = upper(token);
    if (symbol == native_token_) return 1.0;
    for (const auto& [id, p] : pools_) {
        if (p.token_b == symbol) {
            return static_cast<double>(p.reserve_a) / static_cast<double>(p.reserve_b);
        }
    }
    return std::nullopt;
}

std::optional<double> Ledger::price_in_native(const std::string& token) const {
    std::lock_guard lock(mutex_);
    return price_locked(token);
}

WalletPortfolio Ledger::fetch_portfolio_value(const std::string& wallet) const {
    std::lock_guard lock(mutex_);
    auto w = wallets_.find(wallet);
    if (w == wallets_.end()) throw Error(ErrorCode::UnknownWallet, wallet);
    WalletPortfolio out;
    for (const auto& [token, amount] : w->second) {
        if (amount == 0) continue;
        PortfolioItem item;
        item.token = token;
        item.amount = to_units(amount);
        if (auto price = price_locked(token)) {
            item.value_usd = item.amount * *price * native_price_usd_;
        } else {
            item.priced = false;
        }
        out.total_usd += item.value_usd;
        out.items.push_back(std::move(item));
    }
    out.total_native = out.total_usd / native_price_usd_;
    return out;
}

double Ledger::liquidity_usd(const std::string& token) const {
    std::lock_guard lock(mutex_);
    const auto symbol = upper(token);
    for (const auto& [id, p] : pools_) {
        if (p.token_b == symbol) return 2.0 * to_units(p.reserve_a) * native_price_usd_;
    }
    return 0.0;
}

BuyAmounts Ledger::calculate_buy_amounts(const std::string& token) const {
    return buy_amounts_for_liquidity(liquidity_usd(token), native_price_usd_);
}

std::optional<TokenPerformance> Ledger::performance(const std::string& token) const {
    std::lock_guard lock(mutex_);
    auto it = performance_.find(upper(token));
    if (it == performance_.end()) return std::nullopt;
    return it->second;
}

RecommenderMetrics Ledger::metrics(const std::string& recommender_id) const {
    std::lock_guard lock(mutex_);
    auto it = metrics_.find(recommender_id);
    if (it == metrics_.end()) return RecommenderMetrics{recommender_id, 0, 0};
    return it->second;
}

void Ledger::set_performance(TokenPerformance perf) {
    std::lock_guard lock(mutex_);
    perf.token = upper(perf.token);
    performance_[perf.token] = std::move(perf);
}

void Ledger::set_metrics(RecommenderMetrics metrics) {
    std::lock_guard lock(mutex_);
    metrics_[metrics.recommender_id] = std::move(metrics);
}

std::map<std::string, Amount> Ledger::total_supply() const {
    std::lock_guard lock(mutex_);
    std::map<std::string, Amount> out;
    for (const auto& [address, balances] : wallets_) {
        for (const auto& [token, amount] : balances) out[token] += amount;
    }
    for (const auto& [id, p] : pools_) {
        out[p.token_a] += p.reserve_a;
        out[p.token_b] += p.reserve_b;
    }
    return out;
}

std::map<std::string, Amount> Ledger::minted_supply() const {
    std::lock_guard lock(mutex_);
    return minted_;
}

std::vector<SwapLogEntry> Ledger::swap_log() const {
    std::lock_guard lock(mutex_);
    return swap_log_;
}

void Ledger::bind_agent(const std::string& agent_id, const std::string& address) {
    std::lock_guard lock(mutex_);
    if (!wallets_.contains(address)) throw Error(ErrorCode::UnknownWallet, address);
    agent_wallets_[agent_id] = address;
}

std::optional<std::string> Ledger::wallet_of(const std::string& agent_id) const {
    std::lock_guard lock(mutex_);
    auto it = agent_wallets_.find(agent_id);
    if (it == agent_wallets_.end()) return std::nullopt;
    return it->second;
}

std::string Ledger::digest() const {
    std::lock_guard lock(mutex_);
    json doc;
    doc["nativeToken"] = native_token_;
    doc["nativePriceUsd"] = native_price_usd_;
    doc["feeBps"] = fee_bps_;
    json wallets = json::object();
    for (const auto& [address, balances] : wallets_) {
        json b = json::object();
        for (const auto& [token, amount] : balances) {
            if (amount != 0) b[token] = amount;
        }
        wallets[address] = std::move(b);
    }
    doc["wallets"] = std::move(wallets);
    json pools = json::object();
    for (const auto& [id, p] : pools_) {
        pools[id] = {{"tokenA", p.token_a}, {"tokenB", p.token_b}, {"reserveA", p.reserve_a}, {"reserveB", p.reserve_b}};
    }
    doc["pools"] = std::move(pools);
    return sha256_hex(doc.dump());
}

// ---------------------------------------------------------------------------
// Message parsing

std::optional<SwapRequest> parse_swap_request(std::string_view text) {
    static const std::regex re(R"((\d+(?:\.\d+)?)\s+([A-Za-z][A-Za-z0-9]*)\s+(?:for|into|to)\s+([A-Za-z][A-Za-z0-9]*))",
                               std::regex::icase);
    const std::string s(text);
    std::smatch m;
    if (!std::regex_search(s, m, re)) return std::nullopt;
    auto amount = parse_amount(m[1].str());
    if (!amount || *amount <= 0) return std::nullopt;
    SwapRequest out{*amount, upper(m[2].str()), upper(m[3].str())};
    if (out.token_in == out.token_out) return std::nullopt;
    return out;
}

std::optional<TransferRequest> parse_transfer_request(std::string_view text) {
    static const std::regex re(R"((\d+(?:\.\d+)?)\s+([A-Za-z][A-Za-z0-9]*)\s+to\s+([A-Za-z0-9:_\-]+))",
                               std::regex::icase);
    const std::string s(text);
    std::smatch m;
    if (!std::regex_search(s, m, re)) return std::nullopt;
    auto amount = parse_amount(m[1].str());
    if (!amount || *amount <= 0) return std::nullopt;
    return TransferRequest{*amount, upper(m[2].str()), m[3].str()};
}

std::optional<LiquidityRequest> parse_liquidity_request(std::string_view text) {
    static const std::regex re(R"((\d+(?:\.\d+)?)\s+([A-Za-z][A-Za-z0-9]*)\b.*?\bpool\s+([A-Za-z0-9:_\-]+))",
                               std::regex::icase);
    const std::string s(text);
    std::smatch m;
    if (!std::regex_search(s, m, re)) return std::nullopt;
    auto amount = parse_amount(m[1].str());
    if (!amount || *amount <= 0) return std::nullopt;
    return LiquidityRequest{*amount, upper(m[2].str()), m[3].str()};
}

} // namespace agentos
