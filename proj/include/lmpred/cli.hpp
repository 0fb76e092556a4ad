#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmpred::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kVerdictFail = 3 };

/// argv[0] is the program name. Output goes to `out` unless --out is given.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace lmpred::cli
