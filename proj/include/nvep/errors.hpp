#pragma once

#include <stdexcept>
#include <string>

namespace nvep {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A typed value or configuration violates one of its invariants.
// Carries the offending field name so the CLI can report it.
class InvariantError : public Error {
public:
    InvariantError(std::string field, const std::string& msg)
        : Error(msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Mathematical domain violation (negative splitting, division by zero rate, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature exhausted its subdivision budget before reaching tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

// Monte Carlo configuration or run-state problem: invalid config,
// insufficient decay of G(t), aliasing, fast-exchange regime violation.
class SimulationError : public Error {
public:
    using Error::Error;
};

// Fit assembly problem: unknown series kind or missing model parameter.
class FitError : public Error {
public:
    using Error::Error;
};

// File system / stream failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace nvep
