#pragma once

#include <stdexcept>
#include <string>

namespace quakescore {

// Bad input data: malformed files, dimension mismatches, invariant
// violations on construction. CLI exit code 3.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerically degenerate situation: zero variance, nonpositive
// lag-window variance, tilting bound violations. CLI exit code 4.
// `code` is a stable machine-readable tag.
class DegenerateError : public std::runtime_error {
public:
    DegenerateError(std::string code_, const std::string& msg)
        : std::runtime_error(msg), code(std::move(code_)) {}
    std::string code;
};

} // namespace quakescore
