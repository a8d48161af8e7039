#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace zkt {

// Command dispatcher behind the zkt binary.  Parses args (without argv[0]),
// runs one command, writes a JSON document to `out` and diagnostics to `err`.
// Exit codes: 0 success, 1 syntax error (expression or flags), 2 domain
// error, 3 verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zkt
