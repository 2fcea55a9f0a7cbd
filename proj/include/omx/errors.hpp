#pragma once

#include <stdexcept>
#include <string>

namespace omx {

// Bad or missing user input: config keys, fixture names, grid specs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Anything the numerics could not deliver: non-convergence, singular
// resolvents, integrator step underflow.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation not defined for the requested formalism/mode combination.
class CapabilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace omx
