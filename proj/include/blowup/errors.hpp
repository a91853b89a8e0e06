#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// Invalid user-facing configuration (bad dimension, inconsistent geometry).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation could not reach its requested accuracy or lost a structural
/// property it depends on.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace blowup
