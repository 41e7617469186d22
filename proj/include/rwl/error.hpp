#pragma once

#include <stdexcept>
#include <string>

namespace rwl {

/// Failure categories shared by the C++ core and the C API (see rwl.h).
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  GridMismatch = 2,
  NonFinite = 3,
  CflViolation = 4,
  Vacuum = 5,
  Io = 6,
  Config = 7,
  InvariantFailure = 8,
  Interrupted = 9,
  Internal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace rwl
