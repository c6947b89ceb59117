#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace newsgate {

/// Command-line entry point. `args` excludes the program name.
/// Returns 0 on success, 1 on a protocol or verification failure and 2 on a
/// usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace newsgate
