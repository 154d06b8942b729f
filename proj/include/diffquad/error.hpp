#pragma once

#include <stdexcept>
#include <string>

namespace diffquad {

enum class ErrorCode {
  invalid_argument,
  spectrum_exhausted,
  rejected_eigendata,
  numeric_failure,
  io_failure,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::invalid_argument, what);
}

}  // namespace diffquad
