#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rydsat/errors.hpp"
#include "rydsat/spectrum.hpp"

namespace rydsat {

inline constexpr const char* kSummaryVersion = "1";

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitSolver = 3,
  kExitDsp = 4,
  kExitIo = 5,
};

int exit_code_for(ErrorCategory category);

/// Shortest round-trip decimal text, independent of the global locale.
std::string format_number(double v);

/// `# axis=<kind> unit=<u> rbw=<Hz>` followed by x,y rows.
std::string spectrum_csv(const Spectrum& spec);

/// args excludes the program name. Diagnostics go to err, progress to out.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rydsat
