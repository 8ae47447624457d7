#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cachege {

/// Malformed user input (trace, table, grammar, flag text). The CLI maps it to exit 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t line)
        : InputError(what + " at line " + std::to_string(line)), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Semantically invalid configuration (infeasible cache, bad weights, missing baseline).
class ValidationError : public InputError {
public:
    using InputError::InputError;
};

/// Characterization table has no row for a requested hardware triple.
class LookupError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace cachege
