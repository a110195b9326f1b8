#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levelset {

/// Runs one command line (program name excluded). Exit codes: 0 when every
/// verdict passes, 1 when one fails, 2 for usage, config, precondition and
/// write errors. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace levelset
