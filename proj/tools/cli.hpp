#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace selfish::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumeric = 3, kUsage = 4 };

// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selfish::cli
