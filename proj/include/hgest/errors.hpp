#pragma once

#include <stdexcept>
#include <string>

namespace hgest {

// Caller broke a documented precondition (CLI exit code 2).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Reading or writing a file failed (CLI exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by a capped session when the next query would exceed its budget.
struct ResourceExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace hgest
