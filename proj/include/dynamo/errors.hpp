#pragma once

#include <stdexcept>
#include <string>

namespace dynamo {

/// Invalid parameters or options supplied by the caller.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The input lies outside the domain where an operation is defined
/// (poles, sigma1 = 0 normalization, singular Lyapunov equation).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A series, quadrature or iteration failed to reach its tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dynamo
