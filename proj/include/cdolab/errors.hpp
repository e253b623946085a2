#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdolab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or malformed input. Maps to CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A quadrature or derivative estimate did not settle within its budget.
class IndeterminateError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of the Laplace exponent (or one of its derivatives).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Simulation aborted; carries the time and the grid coordinates involved.
class SimulationError : public Error {
public:
    SimulationError(const std::string& what, double t, double z, std::size_t rating)
        : Error(what), t_(t), z_(z), rating_(rating) {}
    explicit SimulationError(const std::string& what) : Error(what) {}

    double time() const { return t_; }
    double z() const { return z_; }
    std::size_t rating() const { return rating_; }

private:
    double t_ = 0.0;
    double z_ = 0.0;
    std::size_t rating_ = 0;
};

}  // namespace cdolab
