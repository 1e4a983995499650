#pragma once

#include <stdexcept>
#include <string>

namespace zeroed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV input (ragged rows, duplicate header names, bad quoting).
class CsvError : public Error {
 public:
  using Error::Error;
};

/// Two tables or masks that must share a shape do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace zeroed
