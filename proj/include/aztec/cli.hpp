#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aztec {

// Runs one subcommand; args excludes the program name.
// Exit codes: 0 success, 2 bad input, 1 numerical failure.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace aztec
