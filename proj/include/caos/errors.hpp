#pragma once

#include <stdexcept>
#include <string>

namespace caos {

// Invalid configuration, profile or argument values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an operator input was not met (e.g. stale ghost layer).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// NaN/Inf detected while stepping.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& field, long step)
        : std::runtime_error("non-finite value in field '" + field + "' at step " +
                             std::to_string(step)),
          field_(field), step_(step) {}
    const std::string& field() const noexcept { return field_; }
    long step() const noexcept { return step_; }

private:
    std::string field_;
    long step_;
};

// An analytic hypothesis required by a diagnostic or experiment does not hold.
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace caos
