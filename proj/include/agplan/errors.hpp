#pragma once

#include <stdexcept>
#include <string>

namespace agplan {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Invalid or physically impossible configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace agplan
