#pragma once

#include <stdexcept>
#include <string>

namespace mmfe {

// Configuration problems (bad input, bad schema, unusable parameters).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownMonthError : ConfigError {
    explicit UnknownMonthError(int month)
        : ConfigError("unknown growth month " + std::to_string(month) +
                      " (tabulated months are 0,2,...,22)") {}
};

struct NonDivisibleExtentError : ConfigError {
    using ConfigError::ConfigError;
};

// Numerical failures.
struct DegenerateElementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CflViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LatticeMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// IO failures; message carries path and cause.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fields above this magnitude are treated as a blown-up explicit step.
inline constexpr double kDefaultBlowupBound = 1e6;

}  // namespace mmfe
