#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ratex {

// Error taxonomy shared by all modules. Each class maps onto one failure
// category of the public contracts so callers can catch selectively.

/// A scalar argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A caller-supplied argument violates a precondition (ordering, size, count).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data is malformed: non-finite intensities, mismatched surfaces.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A query falls outside the domain covered by a discretized surface.
class ExtrapolationError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative or direct solver failed. Carries the time row and the
/// residual at the point of failure.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::size_t time_step, double residual)
        : std::runtime_error(what), time_step_(time_step), residual_(residual) {}

    std::size_t time_step() const noexcept { return time_step_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t time_step_;
    double residual_;
};

}  // namespace ratex
