#pragma once

#include <stdexcept>
#include <string>

namespace divlab {

// Bad arguments or configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A theorem hypothesis fails for the requested tuple (CLI exit code 3).
struct InapplicabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Overflow, divergence or unattainable precision (CLI exit code 4).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace divlab
