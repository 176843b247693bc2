#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "statarb/contracts.hpp"
#include "statarb/data.hpp"
#include "statarb/signals.hpp"
#include "statarb/spread.hpp"
#include "statarb/time.hpp"

namespace statarb {

enum class Side { Buy, Sell };
enum class OrderKind { Limit, Market };
enum class Liquidity { Maker, Taker };

std::string to_string(Side s);
std::string to_string(Liquidity l);

struct Order {
    std::int64_t id = 0;
    SymbolId symbol;
    Side side = Side::Buy;
    OrderKind kind = OrderKind::Limit;
    double limit_price = 0.0;  // meaningful for Limit only
    double size = 0.0;         // whole contracts
    double remaining = 0.0;
    Timestamp placed_at{0};
    Timestamp expires_at{0};  // Limit: market conversion time
};

struct Fill {
    std::int64_t order_id = 0;
    Timestamp ts{0};
    SymbolId symbol;
    Side side = Side::Buy;
    double price = 0.0;
    double size = 0.0;
    double fee_xbt = 0.0;  // negative = rebate
    Liquidity liquidity = Liquidity::Maker;
};

struct Position {
    SymbolId symbol;
    double size = 0.0;         // signed contracts
    double entry_price = 0.0;  // volume-weighted
    Timestamp opened_at{0};
};

struct FundingEvent {
    Timestamp ts{0};
    SymbolId symbol;
    double amount_xbt = 0.0;  // positive = paid out of equity
};

struct EquityPoint {
    Timestamp ts{0};
    double equity = 0.0;
    double realized = 0.0;
    double unrealized = 0.0;
    double fees = 0.0;
    double funding = 0.0;
};

// Realized XBT P&L of closing `signed_size` contracts entered at `entry`
// against `exit_price`. Inverse contracts settle differences of reciprocals
// (each contract is one dollar's worth of XBT), so the sign flips relative
// to the linear formula.
double position_pnl(double signed_size, double entry, double exit_price, const ContractSpec& spec);
double position_pnl(const Position& pos, double exit_price, const ContractSpec& spec);

struct FillPolicy {
    bool repeg_each_minute = true;
    int limit_timeout_minutes = 30;
    int quote_stale_minutes = 1;
};

// Cash and position accounting. Fees and funding accumulate signed, with
// positive values reducing equity:
//   equity = initial + realized + unrealized - fees - funding.
class Ledger {
  public:
    explicit Ledger(double initial_capital) : initial_(initial_capital) {}

    void apply_fill(const Fill& fill, const ContractSpec& spec);

    // Emits funding events for open perpetual positions when ts sits on the
    // contract's schedule. Notional is taken at the last mark.
    void accrue_funding(Timestamp ts, const std::map<SymbolId, ContractSpec>& specs);

    void set_mark(const SymbolId& symbol, double price);

    // Recomputes unrealized P&L at the stored marks and appends an equity
    // point. Positions with no mark yet fall back to their entry price.
    const EquityPoint& mark_to_market(Timestamp ts, const std::map<SymbolId, ContractSpec>& specs);

    double initial_capital() const { return initial_; }
    double realized() const { return realized_; }
    double fees() const { return fees_; }
    double funding() const { return funding_; }
    double position_size(const SymbolId& symbol) const;
    bool flat() const;
    const std::map<SymbolId, Position>& positions() const { return positions_; }
    const std::vector<Fill>& fills() const { return fills_; }
    const std::vector<FundingEvent>& funding_events() const { return funding_events_; }
    const std::vector<EquityPoint>& equity_curve() const { return equity_; }
    const std::map<SymbolId, double>& realized_by_symbol() const { return realized_by_symbol_; }

  private:
    double initial_ = 0.0;
    double realized_ = 0.0;
    double fees_ = 0.0;
    double funding_ = 0.0;
    std::map<SymbolId, Position> positions_;
    std::map<SymbolId, double> marks_;
    std::vector<Fill> fills_;
    std::vector<FundingEvent> funding_events_;
    std::vector<EquityPoint> equity_;
    std::map<SymbolId, double> realized_by_symbol_;
};

// Orders a signal implies at the current book. direction +1 opens the spread
// long (buy positive-weight legs in denominated terms), -1 opens it short.
// Contracts flip sign on inverse legs: exposure to the XBT-denominated
// series 1/price means shorting contracts to hold it long. Throws
// StaleQuoteError when any leg's quote is older than the policy allows.
std::vector<Order> entry_orders(const SpreadDef& spread, int direction, double lot,
                                const std::map<SymbolId, QuoteTick>& quotes,
                                const std::map<SymbolId, ContractSpec>& specs, Timestamp now,
                                const FillPolicy& policy, std::int64_t& next_id);

// Limit orders that flatten the given positions (maker exit).
std::vector<Order> exit_orders(const std::map<SymbolId, Position>& positions,
                               const std::map<SymbolId, QuoteTick>& quotes,
                               const std::map<SymbolId, ContractSpec>& specs, Timestamp now,
                               const FillPolicy& policy, std::int64_t& next_id);

// Market orders that flatten the given positions (window force-close).
std::vector<Order> close_orders(const std::map<SymbolId, Position>& positions, Timestamp now,
                                std::int64_t& next_id);

// Minute-stepped matching. Orders rest until the first minute strictly after
// placement; a Limit fills as Maker at its own price against that minute's
// qualifying trade volume (Buy: prints at or below the limit), partials carry.
// Past expires_at the remainder converts to Market and takes the opposite
// best quote. Unfilled limits re-peg to the fresh best quote after matching.
class FillEngine {
  public:
    FillEngine(std::map<SymbolId, ContractSpec> specs, FillPolicy policy)
        : specs_(std::move(specs)), policy_(policy) {}

    void place(Order order);
    void cancel_all() { open_.clear(); }
    const std::vector<Order>& open_orders() const { return open_; }

    std::vector<Fill> step(Timestamp ts, const std::map<SymbolId, QuoteTick>& quotes,
                           const std::map<SymbolId, std::vector<TradeTick>>& trades);

  private:
    std::map<SymbolId, ContractSpec> specs_;
    FillPolicy policy_;
    std::vector<Order> open_;
};

}  // namespace statarb
