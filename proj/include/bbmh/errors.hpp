#pragma once

#include <stdexcept>
#include <string>

namespace bbmh {

/// Invalid parameters or inconsistent configuration detected before any
/// numerical work starts.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments of the wrong shape (length mismatch etc).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A linear solve could not be completed.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A transform-space operator has a vanishing symbol.
class SingularOperatorError : public SolverError {
public:
    SingularOperatorError(const std::string& what, long mode)
        : SolverError(what), mode_(mode) {}
    long mode() const noexcept { return mode_; }

private:
    long mode_;
};

/// Time integration or a fixed-point iteration left its healthy regime.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bbmh
