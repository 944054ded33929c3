#pragma once

#include <ostream>

namespace msstab::cli {

enum ExitCode { kOk = 0, kUsage = 2, kNumerical = 3 };

/// Entry point shared by the executable and the tests. Data goes to `out`,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace msstab::cli
