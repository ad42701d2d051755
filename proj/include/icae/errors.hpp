#pragma once

#include <stdexcept>
#include <string>

namespace icae {

// Error taxonomy; the CLI maps these onto exit codes (config/usage -> 2,
// model file -> 3, numerical -> 4).

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (shape mismatch, missing cache).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace icae
