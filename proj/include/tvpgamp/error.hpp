#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvpgamp {

/// Malformed or inconsistent input data (bad CSV, missing values, zero variance).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate a documented precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation left its numerical domain (non-positive variance, log of a
/// non-positive level, non-PD system).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rank deficiency in a factorization the caller asked for.
class RankError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Iterative solver blew up. Carries the iteration at which it was detected.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, std::size_t iteration)
        : NumericalError(what), iteration_(iteration) {}

    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

}  // namespace tvpgamp
