#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boresight {

/// Bad argument or violated precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A selection (crop, decimation) produced no points.
class EmptySelection : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The MIQCQP model cannot be built because some point has no candidate pair.
class InfeasibleModel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace boresight
