#pragma once

#include <stdexcept>
#include <string>

namespace statarb {

// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data violates a precondition (empty series, constant series, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Regressor matrix is rank deficient or a moment matrix is too ill
// conditioned to invert.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// OU regression produced a non-negative slope (theta would be <= 0).
class NonMeanRevertingError : public Error {
public:
    using Error::Error;
};

// Weight rounding produced a spread that cannot be traded.
class UntradableError : public Error {
public:
    using Error::Error;
};

// No candidate spread survives the selection filters for a window.
class NoTradeThisWindow : public Error {
public:
    using Error::Error;
};

// Quote snapshot is older than the freshness limit at order time.
class StaleQuoteError : public Error {
public:
    using Error::Error;
};

// A market conversion found no quote to fill against.
class DataGapError : public Error {
public:
    using Error::Error;
};

// Malformed input file (missing, bad header, broken monotonicity).
class DataFormatError : public Error {
public:
    using Error::Error;
};

// Bad configuration value or inconsistent option set.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace statarb
