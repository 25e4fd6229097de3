#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gbd::cli {

// Exit codes: 0 success, 1 computational error, 2 configuration error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gbd::cli
