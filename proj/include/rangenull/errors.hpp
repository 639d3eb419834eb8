#pragma once

#include <stdexcept>
#include <string>

namespace rangenull {

// Base for every error the library raises on bad input or I/O failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition: wrong shape, bad scale,
// non-finite sample, malformed file contents.
class ContractError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rangenull
