#pragma once

#include <stdexcept>
#include <string>

namespace blackstart {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (network file, plan table).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a model invariant. The message names the
/// offending element.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Misuse of the MILP builder (bad bounds, unknown variable ids, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown inside the LP kernel or the ODE integrator.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Rolling-horizon planning could not proceed.
class PlanningError : public Error {
public:
    using Error::Error;
};

}  // namespace blackstart
