#pragma once

#include <stdexcept>
#include <string>

namespace tmag {

// Exit-code contract used by the CLI:
//   0 success, 1 validation error, 2 I/O error, 3 internal/solver error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: out-of-range parameters, malformed configs, rejected keys.
class ValidationError : public Error {
public:
    using Error::Error;
};

// File system / parse failures.
class IoError : public Error {
public:
    using Error::Error;
};

// Numerical failure inside a solver (lost bracket, no convergence).
class SolverError : public Error {
public:
    using Error::Error;
};

// Corrupted hysteresis memory: alternation or dominance violated, or the
// queried field is inconsistent with the stored reversal history.
class StateError : public Error {
public:
    using Error::Error;
};

// Measured-data identification cannot cover the requested grid.
class IdentificationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A tuning target that no saturation-free excursion can reach. Carries the
// remanence interval that is reachable from the current history so callers
// can decide on a fallback.
class UnreachableTargetError : public Error {
public:
    UnreachableTargetError(double target, double lo, double hi)
        : Error("target " + std::to_string(target) +
                " T outside reachable remanence interval [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "] T"),
          target_t(target), reachable_lo_t(lo), reachable_hi_t(hi) {}

    double target_t;
    double reachable_lo_t;
    double reachable_hi_t;
};

} // namespace tmag
