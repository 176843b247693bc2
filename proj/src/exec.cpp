#include "statarb/exec.hpp"

#include <algorithm>
#include <cmath>

#include "statarb/errors.hpp"

namespace statarb {

namespace {

double whole_contracts(double x) { return std::floor(x + 1e-9); }

void validate_order(const Order& o) {
    if (o.size < 1.0 || std::floor(o.size) != o.size)
        throw ConfigError("order size must be a positive whole number of contracts");
    if (o.kind == OrderKind::Limit && !(o.limit_price > 0.0))
        throw ConfigError("limit order needs a positive price");
}

}  // namespace

std::string to_string(Side s) { return s == Side::Buy ? "buy" : "sell"; }
std::string to_string(Liquidity l) { return l == Liquidity::Maker ? "maker" : "taker"; }

double position_pnl(double signed_size, double entry, double exit_price, const ContractSpec& spec) {
    if (!(entry > 0.0) || !(exit_price > 0.0))
        throw DegenerateInputError("position_pnl: prices must be positive");
    switch (spec.kind) {
        case ContractKind::Linear:
            return signed_size * (exit_price - entry);
        case ContractKind::Quanto:
            return signed_size * spec.multiplier * (exit_price - entry);
        case ContractKind::Inverse:
            return signed_size * (1.0 / entry - 1.0 / exit_price);
    }
    throw ConfigError("position_pnl: unknown contract kind");
}

double position_pnl(const Position& pos, double exit_price, const ContractSpec& spec) {
    return position_pnl(pos.size, pos.entry_price, exit_price, spec);
}

void Ledger::apply_fill(const Fill& fill, const ContractSpec& spec) {
    fees_ += fill.fee_xbt;
    fills_.push_back(fill);

    const double qty = fill.side == Side::Buy ? fill.size : -fill.size;
    auto it = positions_.find(fill.symbol);
    if (it == positions_.end() || it->second.size == 0.0) {
        positions_[fill.symbol] = Position{fill.symbol, qty, fill.price, fill.ts};
        return;
    }
    Position& pos = it->second;
    if ((pos.size > 0.0) == (qty > 0.0)) {
        const double total = std::abs(pos.size) + std::abs(qty);
        if (spec.kind == ContractKind::Inverse) {
            // Inverse cost basis is XBT = contracts/price, so only the
            // harmonic blend keeps realized P&L equal to the net cash flows.
            pos.entry_price =
                total / (std::abs(pos.size) / pos.entry_price + std::abs(qty) / fill.price);
        } else {
            pos.entry_price =
                (std::abs(pos.size) * pos.entry_price + std::abs(qty) * fill.price) / total;
        }
        pos.size += qty;
        return;
    }
    const double closed = std::min(std::abs(pos.size), std::abs(qty));
    const double signed_closed = pos.size > 0.0 ? closed : -closed;
    const double pnl = position_pnl(signed_closed, pos.entry_price, fill.price, spec);
    realized_ += pnl;
    realized_by_symbol_[fill.symbol] += pnl;
    pos.size += qty;
    if (pos.size == 0.0) {
        positions_.erase(it);
    } else if ((pos.size > 0.0) == (qty > 0.0)) {
        // flipped through flat: the residue is a fresh position at this price
        pos.entry_price = fill.price;
        pos.opened_at = fill.ts;
    }
}

void Ledger::accrue_funding(Timestamp ts, const std::map<SymbolId, ContractSpec>& specs) {
    for (const auto& [symbol, pos] : positions_) {
        const auto& spec = specs.at(symbol);
        if (!spec.is_perpetual() || spec.funding_rate == 0.0) continue;
        if (!on_funding_schedule(ts, spec.funding_interval_hours)) continue;
        auto mark_it = marks_.find(symbol);
        const double mark = mark_it != marks_.end() ? mark_it->second : pos.entry_price;
        const double notional = std::abs(spec.notional_xbt(pos.size, mark));
        const double amount = notional * spec.funding_rate * (pos.size > 0.0 ? 1.0 : -1.0);
        funding_ += amount;
        funding_events_.push_back({ts, symbol, amount});
    }
}

void Ledger::set_mark(const SymbolId& symbol, double price) { marks_[symbol] = price; }

const EquityPoint& Ledger::mark_to_market(Timestamp ts, const std::map<SymbolId, ContractSpec>& specs) {
    double unrealized = 0.0;
    for (const auto& [symbol, pos] : positions_) {
        auto it = marks_.find(symbol);
        const double mark = it != marks_.end() ? it->second : pos.entry_price;
        unrealized += position_pnl(pos, mark, specs.at(symbol));
    }
    EquityPoint pt;
    pt.ts = ts;
    pt.realized = realized_;
    pt.unrealized = unrealized;
    pt.fees = fees_;
    pt.funding = funding_;
    pt.equity = initial_ + realized_ + unrealized - fees_ - funding_;
    equity_.push_back(pt);
    return equity_.back();
}

double Ledger::position_size(const SymbolId& symbol) const {
    auto it = positions_.find(symbol);
    return it == positions_.end() ? 0.0 : it->second.size;
}

bool Ledger::flat() const {
    for (const auto& [_, pos] : positions_)
        if (pos.size != 0.0) return false;
    return true;
}

namespace {

const QuoteTick& fresh_quote(const std::map<SymbolId, QuoteTick>& quotes, const SymbolId& symbol,
                             Timestamp now, int stale_minutes) {
    auto it = quotes.find(symbol);
    if (it == quotes.end())
        throw StaleQuoteError("no quote seen yet for " + symbol);
    if (now.minutes - it->second.ts.minutes > stale_minutes)
        throw StaleQuoteError("quote for " + symbol + " is older than the freshness bound");
    return it->second;
}

Order make_limit(std::int64_t id, const SymbolId& symbol, Side side, double price, double size,
                 Timestamp now, const FillPolicy& policy) {
    Order o;
    o.id = id;
    o.symbol = symbol;
    o.side = side;
    o.kind = OrderKind::Limit;
    o.limit_price = price;
    o.size = size;
    o.remaining = size;
    o.placed_at = now;
    o.expires_at = Timestamp{now.minutes + policy.limit_timeout_minutes};
    return o;
}

}  // namespace

std::vector<Order> entry_orders(const SpreadDef& spread, int direction, double lot,
                                const std::map<SymbolId, QuoteTick>& quotes,
                                const std::map<SymbolId, ContractSpec>& specs, Timestamp now,
                                const FillPolicy& policy, std::int64_t& next_id) {
    if (direction != 1 && direction != -1) throw ConfigError("entry_orders: direction must be +-1");
    std::vector<Order> out;
    for (const auto& leg : spread.legs) {
        const auto& spec = specs.at(leg.symbol);
        double contracts = direction * leg.weight * lot;
        if (spec.kind == ContractKind::Inverse) contracts = -contracts;
        if (contracts == 0.0) continue;
        const auto& q = fresh_quote(quotes, leg.symbol, now, policy.quote_stale_minutes);
        const Side side = contracts > 0.0 ? Side::Buy : Side::Sell;
        const double price =
            spec.snap_to_grid(side == Side::Buy ? q.bid_price : q.ask_price);
        out.push_back(make_limit(next_id++, leg.symbol, side, price, std::abs(contracts), now, policy));
    }
    return out;
}

std::vector<Order> exit_orders(const std::map<SymbolId, Position>& positions,
                               const std::map<SymbolId, QuoteTick>& quotes,
                               const std::map<SymbolId, ContractSpec>& specs, Timestamp now,
                               const FillPolicy& policy, std::int64_t& next_id) {
    std::vector<Order> out;
    for (const auto& [symbol, pos] : positions) {
        if (pos.size == 0.0) continue;
        const auto& spec = specs.at(symbol);
        const auto& q = fresh_quote(quotes, symbol, now, policy.quote_stale_minutes);
        const Side side = pos.size > 0.0 ? Side::Sell : Side::Buy;
        const double price = spec.snap_to_grid(side == Side::Buy ? q.bid_price : q.ask_price);
        out.push_back(make_limit(next_id++, symbol, side, price, std::abs(pos.size), now, policy));
    }
    return out;
}

std::vector<Order> close_orders(const std::map<SymbolId, Position>& positions, Timestamp now,
                                std::int64_t& next_id) {
    std::vector<Order> out;
    for (const auto& [symbol, pos] : positions) {
        if (pos.size == 0.0) continue;
        Order o;
        o.id = next_id++;
        o.symbol = symbol;
        o.side = pos.size > 0.0 ? Side::Sell : Side::Buy;
        o.kind = OrderKind::Market;
        o.size = std::abs(pos.size);
        o.remaining = o.size;
        o.placed_at = now;
        o.expires_at = now;
        out.push_back(o);
    }
    return out;
}

void FillEngine::place(Order order) {
    validate_order(order);
    if (order.remaining <= 0.0) order.remaining = order.size;
    if (specs_.find(order.symbol) == specs_.end())
        throw ConfigError("no contract spec for " + order.symbol);
    open_.push_back(std::move(order));
}

std::vector<Fill> FillEngine::step(Timestamp ts, const std::map<SymbolId, QuoteTick>& quotes,
                                   const std::map<SymbolId, std::vector<TradeTick>>& trades) {
    std::vector<Fill> fills;

    for (auto& order : open_) {
        if (order.placed_at.minutes >= ts.minutes) continue;  // >= 1 minute gap
        const auto& spec = specs_.at(order.symbol);
        auto quote_it = quotes.find(order.symbol);
        const QuoteTick* quote = quote_it != quotes.end() ? &quote_it->second : nullptr;

        if (order.kind == OrderKind::Limit && ts.minutes >= order.expires_at.minutes)
            order.kind = OrderKind::Market;

        if (order.kind == OrderKind::Market) {
            if (quote == nullptr)
                throw DataGapError("no quote to fill market order for " + order.symbol + " at " +
                                   format_timestamp(ts));
            const double price = order.side == Side::Buy ? quote->ask_price : quote->bid_price;
            const double avail = order.side == Side::Buy ? quote->ask_size : quote->bid_size;
            const double qty = std::min(order.remaining, whole_contracts(avail));
            if (qty >= 1.0) {
                Fill f{order.id, ts, order.symbol, order.side, price, qty, 0.0, Liquidity::Taker};
                f.fee_xbt = std::abs(spec.notional_xbt(qty, price)) * spec.taker_fee_rate;
                fills.push_back(f);
                order.remaining -= qty;
            }
            continue;
        }

        // Maker path: sum this minute's prints at prices crossing the limit.
        double qualifying = 0.0;
        auto trades_it = trades.find(order.symbol);
        if (trades_it != trades.end()) {
            for (const auto& tr : trades_it->second) {
                const bool crosses = order.side == Side::Buy ? tr.price <= order.limit_price
                                                             : tr.price >= order.limit_price;
                if (crosses) qualifying += tr.size;
            }
        }
        const double qty = std::min(order.remaining, whole_contracts(qualifying));
        if (qty >= 1.0) {
            Fill f{order.id, ts, order.symbol, order.side, order.limit_price, qty, 0.0,
                   Liquidity::Maker};
            f.fee_xbt = std::abs(spec.notional_xbt(qty, order.limit_price)) * spec.maker_fee_rate;
            fills.push_back(f);
            order.remaining -= qty;
        }
        if (order.remaining > 0.0 && policy_.repeg_each_minute && quote != nullptr) {
            order.limit_price =
                spec.snap_to_grid(order.side == Side::Buy ? quote->bid_price : quote->ask_price);
        }
    }

    open_.erase(std::remove_if(open_.begin(), open_.end(),
                               [](const Order& o) { return o.remaining < 1.0; }),
                open_.end());
    return fills;
}

}  // namespace statarb
