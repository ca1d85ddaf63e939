#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hpfilt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix size violates an operation's contract.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A scalar parameter (smoothing weight, iteration count, ...) is out of range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// CSV header lacks a requested column.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A CSV cell failed to parse; `row` is the 1-based data row.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row_index)
        : Error(what), row(row_index) {}
    std::size_t row;
};

/// Dates are present but not strictly increasing.
class OrderingError : public Error {
public:
    using Error::Error;
};

/// A value is outside the mathematical domain; `index` is the 0-based offender.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::size_t value_index)
        : Error(what), index(value_index) {}
    std::size_t index;
};

/// Destination could not be opened or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// The first-stage cycle has zero l1 norm: the series is perfectly trended
/// and the successive filter stops at one stage.
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace hpfilt
