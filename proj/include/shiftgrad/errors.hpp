#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shiftgrad {

/// Malformed input text. `line` is 1-based, 0 when not tied to a line.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A statistic that cannot be computed from the data (e.g. log of a zero variance).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace shiftgrad
