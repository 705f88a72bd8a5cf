// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hjj {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a 0-based offset into the source.
class ParseError : public Error {
public:
    enum class Kind { Syntax, UnknownVariable, UnknownFunction };

    ParseError(Kind kind, std::string message, std::size_t position, std::string expected = {})
        : Error(format(message, position, expected)),
          message_{message},
          kind_{kind},
          position_{position},
          expected_{std::move(expected)} {}

    Kind kind() const noexcept { return kind_; }
    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }
    const std::string& message() const noexcept { return message_; }

    /// Same error with `context` (e.g. the field name) prefixed to the message.
    ParseError in(const std::string& context) const {
        return ParseError(kind_, context + ": " + message_, position_, expected_);
    }

private:
    static std::string format(const std::string& message, std::size_t position,
                              const std::string& expected) {
        std::string s = message + " at position " + std::to_string(position);
        if (!expected.empty()) s += " (expected " + expected + ")";
        return s;
    }

    std::string message_;
    Kind kind_;
    std::size_t position_;
    std::string expected_;
};

/// Evaluation outside a function's domain (log of nonpositive, division by zero, ...).
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_{position} {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Non-finite state during ODE integration.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double time)
        : Error(what + " at t=" + std::to_string(time)), time_{time} {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Problem definition is inconsistent (array sizes, regime field counts, schedule).
class SpecError : public Error {
public:
    using Error::Error;
};

/// u_hat left the admissible range [u*-1, u*+1].
class RangeError : public Error {
public:
    RangeError(const std::string& what, double time, double value)
        : Error(what + " (u=" + std::to_string(value) + " at t=" + std::to_string(time) + ")"),
          time_{time},
          value_{value} {}

    double time() const noexcept { return time_; }
    double value() const noexcept { return value_; }

private:
    double time_;
    double value_;
};

/// Query outside the region where the construction is defined.
class OutOfDomainError : public Error {
public:
    using Error::Error;
};

class InversionError : public Error {
public:
    enum class Kind { MaxIterations, NonContraction, Singular };

    InversionError(Kind kind, const std::string& what, double residual)
        : Error(what), kind_{kind}, residual_{residual} {}

    Kind kind() const noexcept { return kind_; }
    double residual() const noexcept { return residual_; }

private:
    Kind kind_;
    double residual_;
};

}  // namespace hjj
