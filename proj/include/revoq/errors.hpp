#pragma once

#include <stdexcept>
#include <string>

namespace revoq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A requested state or table would exceed the hard dimension limits.
struct DimensionTooLarge : Error {
    using Error::Error;
};

/// Two operands live in different Hilbert spaces.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// Exact enumeration or a query budget was exceeded.
struct BudgetExceeded : Error {
    using Error::Error;
};

/// The extractor was handed a phase that made no oracle queries.
struct NoQueries : Error {
    using Error::Error;
};

/// A config value failed validation; message names the field.
struct BadParameter : Error {
    using Error::Error;
};

struct UnknownExperiment : Error {
    using Error::Error;
};

}  // namespace revoq
