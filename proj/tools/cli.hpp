#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace diffquad::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerdictFailed = 1;
inline constexpr int kBadConfig = 2;
inline constexpr int kNumericFailure = 3;

// args excludes the program name: {"wce-sweep", "--space", "circle", ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diffquad::cli
