#pragma once

#include <stdexcept>
#include <string>

namespace parapos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A coefficient evaluator returned a non-finite or structurally invalid value.
class CoefficientError : public Error {
public:
    using Error::Error;
};

/// A problem, domain, grid or option set violates its construction invariants.
class SpecError : public Error {
public:
    using Error::Error;
};

/// The time integrator could not produce a valid next state.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& what, double time = 0.0)
        : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class NonContraction : public Error {
public:
    using Error::Error;
};

class DegenerateRefinement : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function (e.g. t <= 0 for a kernel).
class DomainError : public Error {
public:
    using Error::Error;
};

class IntegrabilityError : public Error {
public:
    using Error::Error;
};

class DivisionDomainError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration failed validation. `pointer()` is a JSON pointer to the offending value.
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, const std::string& message)
        : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

}  // namespace parapos
