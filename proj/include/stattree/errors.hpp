#pragma once

#include <stdexcept>
#include <string>

namespace stattree {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed CSV, unknown column, sample too small, argument out
// of domain. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed to reach its tolerance. Treated as an internal
// failure (exit code 1), never as a user error.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace stattree
