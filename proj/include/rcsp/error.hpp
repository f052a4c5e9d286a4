#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rcsp {

/// Raised when arguments violate an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for inputs outside the supported regime (e.g. forcing analysis with k != 2).
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text-format error carrying the 1-based line it was detected on.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace rcsp
