#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace geosearch {

// Full command-line surface (gen / build / query / bench / sweep-study).
// `args` excludes the program name. Returns the process exit code; all
// output goes to the given streams so tests can capture it.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace geosearch
