#pragma once

#include <stdexcept>
#include <string>

namespace sphw {

/// Argument outside the mathematical domain of an operation (h <= 0, rho <= 0,
/// unnormalized measure, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent or unsupported configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Initial particle system could not be constructed.
class InitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise invalid numerical state.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure during time integration; names the step and the particle.
class IntegrationError : public NumericError {
public:
    IntegrationError(long step, std::size_t particle, const std::string& what)
        : NumericError("step " + std::to_string(step) + ", particle " + std::to_string(particle) +
                       ": " + what),
          step_(step),
          particle_(particle) {}

    long step() const noexcept { return step_; }
    std::size_t particle() const noexcept { return particle_; }

private:
    long step_;
    std::size_t particle_;
};

}  // namespace sphw
