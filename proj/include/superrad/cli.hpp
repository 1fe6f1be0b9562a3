#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace superrad::cli {

enum ExitStatus : int { ok = 0, validation_error = 1, runtime_failure = 2 };

/// Runs one command line (without the program name). Output goes to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace superrad::cli
