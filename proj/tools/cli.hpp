#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xlsent::cli {

// Runs one command line (without the program name). Returns the exit
// status: 0 success, 1 validation failure, 2 runtime failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xlsent::cli
