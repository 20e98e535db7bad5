#ifndef LOWTHRUST_ERRORS_HPP
#define LOWTHRUST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lowthrust {

/// Base class for every failure raised by the solver stack.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Both control costates vanish, so the thrust direction is undefined.
class DegenerateControl : public Error {
public:
    using Error::Error;
};

/// The requested transfer cannot fit inside the time window.
class InfeasibleWindow : public Error {
public:
    using Error::Error;
};

/// A scalar root or minimum could not be bracketed.
class NoBracket : public Error {
public:
    using Error::Error;
};

/// Numerical propagation produced non-finite values after all retries.
class PropagationError : public Error {
public:
    using Error::Error;
};

/// Iterative solver stopped without meeting its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Evaluation hit an excluded point (pole, cos I = 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Mission configuration is missing a key or holds an invalid value.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace lowthrust

#endif // LOWTHRUST_ERRORS_HPP
