#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpnnc {

/// Malformed expression text. Carries the byte offset of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position)
        : std::runtime_error(message + " at position " + std::to_string(position)),
          message_(message),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }
    /// The message without the position suffix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t position_;
};

/// Feature dimension, projection index or layer shape does not line up.
class ArityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested compilation mode does not apply to the expression.
class ModeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An approximation could not be certified within the configured budget.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Edge list violates the graph invariants (loop or dangling endpoint).
class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace mpnnc
