#pragma once

#include <stdexcept>
#include <string>

namespace ndekit {

// Bad or missing input: unknown keys, units, labels, unreadable files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation could not deliver the requested accuracy.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inputs parse fine but violate a physical or domain precondition.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ndekit
