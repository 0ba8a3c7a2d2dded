// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace bellsim {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct InvalidSubsystem : Error {
    using Error::Error;
};

struct NotHermitian : Error {
    using Error::Error;
};

struct NotUnitTrace : Error {
    using Error::Error;
};

struct NotPsd : Error {
    using Error::Error;
};

struct NotUnitary : Error {
    using Error::Error;
};

struct ZeroProbabilityEvent : Error {
    using Error::Error;
};

struct OutOfRange : Error {
    using Error::Error;
};

struct NotSubset : Error {
    using Error::Error;
};

struct UnknownContext : Error {
    using Error::Error;
};

struct WrongScenario : Error {
    using Error::Error;
};

struct IncompatibleModel : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};

struct UnknownParameter : Error {
    using Error::Error;
};

/// Parse failure in a model file; carries 1-based line/column.
struct ParseError : Error {
    int line;
    int column;
    ParseError(const std::string& what, int line_, int column_)
        : Error(what + " (line " + std::to_string(line_) + ", column " + std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}
};

/// Invalid experiment configuration; carries the offending field path.
struct ConfigError : Error {
    std::string field;
    explicit ConfigError(const std::string& field_, const std::string& what)
        : Error(field_ + ": " + what), field(field_) {}
};

/// Two independently computed routes to the same quantity disagreed.
/// Thrown by operations whose contract requires the cross-check.
struct ConsistencyFailure : Error {
    using Error::Error;
};

}  // namespace bellsim
