#pragma once

#include <string>
#include <vector>

namespace simplexmc::cli {

/// Parse and execute one command line (without the program name). Returns
/// the process exit code: 0 on success, 1 on validation or tolerance
/// failure (with a JSON report on stdout), 2 on usage errors.
int run(const std::vector<std::string>& args);

}
