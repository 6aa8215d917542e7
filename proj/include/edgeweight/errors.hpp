#pragma once

#include <stdexcept>
#include <string>

namespace edgeweight {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A model was asked for something it cannot supply (e.g. index past a custom
// sequence without a tail rule).
class ModelError : public Error {
public:
    using Error::Error;
};

// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Non-finite intermediate, quadrature or integrator failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Invalid user configuration (CLI flags, config files, grids).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace edgeweight
