#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqsm {

/// Raised for malformed configuration or parameters violating their invariants.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base for failures of the numerics themselves (non-finite values, no root, divergence).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A drift, diffusion or score evaluation produced a non-finite value.
class StepError : public NumericalError {
public:
    StepError(std::string field, std::size_t step, const std::string& what)
        : NumericalError(what), field_(std::move(field)), step_(step) {}

    const std::string& field() const noexcept { return field_; }
    std::size_t step() const noexcept { return step_; }

private:
    std::string field_;
    std::size_t step_;
};

/// Learning produced non-finite or runaway parameters.
class DivergenceError : public NumericalError {
public:
    DivergenceError(std::size_t step, double last_delta, const std::string& what)
        : NumericalError(what), step_(step), last_delta_(last_delta) {}

    std::size_t step() const noexcept { return step_; }
    double last_delta() const noexcept { return last_delta_; }

private:
    std::size_t step_;
    double last_delta_;
};

}  // namespace cqsm
