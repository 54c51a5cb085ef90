#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two fields (or a field and a domain) live on different grids.
class DomainMismatchError : public Error {
public:
    using Error::Error;
};

/// A precondition on an argument does not hold (bad exponent, zero field, ...).
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// The frequency lies at or below -lambda_Omega, so the Nehari set cannot be
/// reached by rescaling and the action level degenerates.
class BelowSpectrumError : public Error {
public:
    using Error::Error;
};

/// An iterative method hit its iteration cap before meeting its tolerance.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

/// Iterates blew up or concentrated at the grid scale; on the energy side this
/// is the discrete signature of an energy level equal to -infinity.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or command-line input.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nehari
