// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace semseg {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened or read.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input file exists but its structure is wrong (header, schema).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (unknown id, bad range, duplicate name).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Data violates an operation's domain (NaN, negative input, empty frame,
/// non-increasing timestamps, degenerate analysis).
class DataError : public Error {
public:
    using Error::Error;
};

/// Sequence too short for the requested operation.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Correlation requested on a constant sequence.
class UndefinedCorrelationError : public DataError {
public:
    using DataError::DataError;
};

} // namespace semseg
