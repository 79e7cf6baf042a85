#pragma once

#include <iosfwd>

namespace codemix::cli {

// Full command-line entry point. Returns the process exit code:
// 0 success, 2 config/schema/io, 3 data/corruption, 4 numeric.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace codemix::cli
