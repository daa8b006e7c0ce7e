#pragma once

#include <stdexcept>
#include <string>

namespace gol {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value (bins, fractions, unknown keys, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

// A decision vector or other numeric argument violates its contract.
class ParameterError : public Error {
public:
  using Error::Error;
};

// Dataset content does not satisfy a precondition (missing class, empty set).
class DataError : public Error {
public:
  using Error::Error;
};

// File could not be read, decoded, or written.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace gol
