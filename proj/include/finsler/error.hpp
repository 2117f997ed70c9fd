#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sizes of inputs do not agree (point length, tensor rank, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A computation needs more jet order than the configured budget.
class OrderBudgetError : public Error {
public:
    OrderBudgetError(const std::string& what, int required, int available)
        : Error(what + ": requires jet order " + std::to_string(required) + ", have " +
                std::to_string(available)),
          required_(required),
          available_(available) {}

    int required() const noexcept { return required_; }
    int available() const noexcept { return available_; }

private:
    int required_;
    int available_;
};

/// An elementary function was applied outside its domain (log of a negative
/// value, division by a zero-valued jet, ...).
class ArithmeticDomainError : public Error {
public:
    using Error::Error;
};

/// The sample (x,y) lies outside the region where the metric is usable:
/// degenerate or indefinite fundamental tensor, nonpositive L, ...
class DomainError : public Error {
public:
    using Error::Error;
};

/// Metric DSL or config syntax problems. `position` is a 0-based offset into
/// the source text, or npos when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position = std::string::npos)
        : Error(position == std::string::npos ? what
                                              : what + " (at offset " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// A metric model failed one of its admission checks.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A theorem check whose hypotheses are not met by the model.
class RefusedError : public Error {
public:
    using Error::Error;
};

}  // namespace finsler
