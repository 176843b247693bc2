#pragma once

#include <cmath>
#include <string>

#include "statarb/errors.hpp"

namespace statarb {

using SymbolId = std::string;

enum class ContractKind { Linear, Inverse, Quanto };

inline std::string to_string(ContractKind k) {
    switch (k) {
        case ContractKind::Linear: return "linear";
        case ContractKind::Inverse: return "inverse";
        case ContractKind::Quanto: return "quanto";
    }
    return "linear";
}

inline ContractKind contract_kind_from_string(const std::string& s) {
    if (s == "linear") return ContractKind::Linear;
    if (s == "inverse") return ContractKind::Inverse;
    if (s == "quanto") return ContractKind::Quanto;
    throw ConfigError("unknown contract kind: '" + s + "'");
}

// Static instrument description. Fee rates are signed fractions of XBT
// notional (negative maker fee means a rebate).
struct ContractSpec {
    SymbolId symbol;
    ContractKind kind = ContractKind::Linear;
    double multiplier = 1.0;  // XBT per contract per unit price move (Quanto)
    double tick_size = 1e-8;
    double maker_fee_rate = -0.00025;
    double taker_fee_rate = 0.00075;
    double funding_rate = 0.0001;
    int funding_interval_hours = 8;  // 0 disables funding (futures)

    bool is_perpetual() const { return funding_interval_hours > 0; }

    void validate() const {
        if (tick_size <= 0.0) throw ConfigError(symbol + ": tick_size must be positive");
        if (kind == ContractKind::Quanto && multiplier <= 0.0)
            throw ConfigError(symbol + ": quanto multiplier must be positive");
    }

    // True when price sits on the tick grid within tick_size * 1e-6.
    bool on_tick_grid(double price) const {
        const double ratio = price / tick_size;
        return std::fabs(ratio - std::round(ratio)) * tick_size <= tick_size * 1e-6;
    }

    double snap_to_grid(double price) const { return std::round(price / tick_size) * tick_size; }
    double snap_down(double price) const { return std::floor(price / tick_size + 1e-9) * tick_size; }
    double snap_up(double price) const { return std::ceil(price / tick_size - 1e-9) * tick_size; }

    // XBT value of one quoted price unit, i.e. the denominated close for a
    // unit close price. Inverse contracts value 1 USD of bitcoin.
    double denominate_close(double close) const {
        if (close <= 0.0) throw DegenerateInputError(symbol + ": non-positive close price");
        switch (kind) {
            case ContractKind::Linear: return close;
            case ContractKind::Quanto: return close * multiplier;
            case ContractKind::Inverse: return 1.0 / close;
        }
        return close;
    }

    // XBT notional of `size` contracts at quoted price.
    double notional_xbt(double size, double price) const {
        switch (kind) {
            case ContractKind::Linear: return size * price;
            case ContractKind::Quanto: return size * multiplier * price;
            case ContractKind::Inverse: return size / price;
        }
        return size * price;
    }
};

}  // namespace statarb
