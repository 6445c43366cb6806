#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace spread_edge {

/// Raised when an argument falls outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised for projections the margin model does not cover (|spread| beyond the matrix).
class OutOfModelError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Malformed input data. Row is the 1-based line number in the source file
/// (header is line 1); zero when the error is not tied to a row.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, std::string column, const std::string& what)
        : std::runtime_error(what), row_(row), column_(std::move(column)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

} // namespace spread_edge
