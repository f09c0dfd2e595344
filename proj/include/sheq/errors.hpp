#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sheq {

/// Non-convergence or non-finite values in a numerical routine.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A trajectory left the finite range; carries where it happened.
class BlowUpError : public NumericalError {
public:
    BlowUpError(std::size_t step, std::size_t mode)
        : NumericalError("blow-up at step " + std::to_string(step) + ", mode " + std::to_string(mode)),
          step_(step), mode_(mode) {}

    [[nodiscard]] std::size_t step() const { return step_; }
    [[nodiscard]] std::size_t mode() const { return mode_; }

private:
    std::size_t step_;
    std::size_t mode_;
};

/// Invalid experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace sheq
