#pragma once

#include <stdexcept>
#include <string>

namespace dymo {

/// Raised when an estimator has no (or too little) data to answer a query,
/// e.g. a quantile over an empty report set.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an argument falls outside the domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for malformed run configuration, config files or table files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dymo
