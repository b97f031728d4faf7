#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oais::gateway {

// Command-line surface. args excludes the program name. Exit codes: 0 ok,
// 1 protocol/application error, 2 usage or configuration error, 3 transport.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oais::gateway
