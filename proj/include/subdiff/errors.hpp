#pragma once

#include <stdexcept>
#include <string>

namespace subdiff {

// Bad parameters, inconsistent inputs, rejected configs.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Singular systems, diverging runs.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace subdiff
