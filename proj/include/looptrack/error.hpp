#pragma once

#include <stdexcept>
#include <string>

namespace looptrack {

// Base for everything the library throws on bad input or configuration.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags, bad parameters, missing mapped columns. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable or semantically empty input data. CLI exit code 3.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace looptrack
