#pragma once

#include <stdexcept>
#include <string>

namespace actparse {

// Base of every error raised by the library. The CLI maps each subclass to
// its own process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, dimensions, indices).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The length bounds admit no segmentation of the sequence.
class NoValidParse : public Error {
 public:
  using Error::Error;
};

// Rejected configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace actparse
