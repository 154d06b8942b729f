#include "diffquad/error.hpp"

namespace diffquad {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::spectrum_exhausted: return "spectrum-exhausted";
    case ErrorCode::rejected_eigendata: return "rejected-eigendata";
    case ErrorCode::numeric_failure: return "numeric-failure";
    case ErrorCode::io_failure: return "io-failure";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace diffquad
