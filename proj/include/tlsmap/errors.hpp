// errors.hpp — exception types shared by the tlsmap modules

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tlsmap {

// Input outside its physical domain (|z| > 1, unnormalized state, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A quantity that is undefined at the given input (phase of a zero amplitude,
// mixing angle of a null Hamiltonian, division by Z(0)z(0) = 0).
class UndefinedError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Integration failure: non-finite derivative, step-size underflow, too many
// aborted realizations. Carries the time and state where it happened.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double t = 0.0, std::vector<double> state = {})
        : std::runtime_error(what), time_(t), state_(std::move(state)) {}

    double time() const noexcept { return time_; }
    const std::vector<double>& state() const noexcept { return state_; }

private:
    double time_;
    std::vector<double> state_;
};

// Malformed or out-of-range configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tlsmap
