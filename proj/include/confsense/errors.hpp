#pragma once

#include <stdexcept>
#include <string>

namespace confsense {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid inputs: malformed specs, degenerate data, out-of-range arguments.
/// The CLI maps this to exit code 2.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Numerical failure during an otherwise valid computation (weak first stage,
/// non-convergence). The CLI maps this to exit code 3.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

} // namespace confsense
