#pragma once

#include <stdexcept>
#include <string>

namespace nsmap {

/// Bad shapes, out-of-range indices, malformed signs and similar caller errors.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An integration produced a non-finite value or left the |y| <= 1e12 box.
class IntegrationDiverged : public std::runtime_error {
public:
    IntegrationDiverged(const std::string& what, double tau)
        : std::runtime_error(what + " (tau = " + std::to_string(tau) + ")"), tau_(tau)
    {
    }

    double tau() const noexcept { return tau_; }

private:
    double tau_;
};

/// Richardson differences fell below the roundoff floor, so no order can be read off.
class OrderIndeterminate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// S or R is numerically singular at the node used to solve for the constant blocks.
class SingularFactor : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMetric : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Finite differencing of a potential failed: non-real potential, step too small,
/// or disagreement with a supplied closed-form metric.
class DifferentiationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nsmap
