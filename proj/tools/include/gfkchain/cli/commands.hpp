#pragma once

#include <iosfwd>

namespace gfkchain::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUser = 2,
  kExitIo = 3,
  kExitNumeric = 4,
};

/// Entry point of the gfkchain tool. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gfkchain::cli
