// Command-line driver: compile rotation targets into pulse programs,
// simulate and verify them numerically, run parameter sweeps, and compare
// schemes. Exit codes: 0 success, 2 invalid request, 3 verification
// failure.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holoq::cli {

// args excludes the program name. Output and diagnostics go to the given
// streams; the HOLOQ_TOL environment variable supplies the default
// verification tolerance when --tol is absent.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace holoq::cli
