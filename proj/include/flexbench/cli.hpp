#pragma once

#include <ostream>

namespace flexbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitModel = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace flexbench
