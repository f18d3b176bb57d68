#pragma once

#include <stdexcept>
#include <string>

namespace cdr {

// Input-validation and runtime failures. The CLI maps these onto its
// exit-code contract (2 = input, 3 = convergence, 4 = resource).

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NegativeMassError : InputError {
    using InputError::InputError;
};

struct NotNormalizedError : InputError {
    using InputError::InputError;
};

struct ShapeMismatchError : InputError {
    using InputError::InputError;
};

struct CoordOverlapError : InputError {
    using InputError::InputError;
};

struct BudgetNegativeError : InputError {
    using InputError::InputError;
};

struct LengthMismatchError : InputError {
    using InputError::InputError;
};

struct InfeasibleError : InputError {
    using InputError::InputError;
};

struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cdr
