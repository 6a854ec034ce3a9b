#pragma once

#include <stdexcept>
#include <string>

namespace lyap {

// Input text that does not parse (ensemble JSON, graph files, CSV flags).
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input that violates a precondition: bad flag value,
// index out of range, zero scale factor, evaluation budget exceeded.
struct argument_error : std::runtime_error {
    explicit argument_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation that cannot meet its numeric contract: factorization
// residual too large, inconsistent sign oracle, failed self-check.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lyap
