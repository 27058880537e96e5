#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qrep {

// Full command-line front end, callable in-process. Returns the exit code:
// 0 success, 1 numeric-validation failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qrep
