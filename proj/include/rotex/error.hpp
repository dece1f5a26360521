#pragma once

#include <stdexcept>
#include <string>

namespace rotex {

/// Base class for every error raised by the library. Callers that only care
/// about "the run failed" catch this; the subclasses exist for tests.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

class TruncationFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rotex
