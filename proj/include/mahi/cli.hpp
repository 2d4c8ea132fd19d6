#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mahi {

// Runs the command line. `args` excludes the program name.
// Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

// "a..b", "a,b,c" or "a"; ranges are inclusive with step 1.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace mahi
