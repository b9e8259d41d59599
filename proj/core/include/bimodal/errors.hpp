#pragma once

#include <stdexcept>
#include <string>

namespace bimodal {

/// Invalid argument to a mathematical operation (zero detuning, negative occupation, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configuration that violates a physical invariant or cannot be parsed.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested time lies beyond the recurrence horizon of a discretized bath.
class HorizonError : public std::out_of_range {
public:
    HorizonError(const std::string& what, std::size_t required_modes)
        : std::out_of_range(what), required_modes_(required_modes) {}

    std::size_t required_modes() const noexcept { return required_modes_; }

private:
    std::size_t required_modes_;
};

/// Internal consistency failure of a numerical routine.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bimodal
