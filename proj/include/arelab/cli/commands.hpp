#pragma once

#include <iosfwd>

namespace arelab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumeric = 3,
  kExitSearchExhausted = 4,
};

// Entry point of the arelab executable, with the streams injectable for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace arelab::cli
