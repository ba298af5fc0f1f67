#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fiet::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kBadInput = 2, kPrecision = 3 };

// Runs one command line (without the program name).  Files named "-" are
// read from `in`.  Output JSON goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace fiet::cli
