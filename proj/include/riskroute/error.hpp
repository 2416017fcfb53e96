#pragma once

#include <stdexcept>
#include <string>

namespace riskroute {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. Messages carry file and row context.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The routing instance admits no solution under the requested constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Input exceeds a documented engine limit.
class LimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskroute
