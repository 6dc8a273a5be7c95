#pragma once

#include <stdexcept>
#include <string>

namespace extnet {

enum class ErrorCode {
  invalid_argument = 1,
  parse = 2,
  numeric = 3,
  io = 4,
  unestimable = 5,
  nonconvergence = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace extnet
