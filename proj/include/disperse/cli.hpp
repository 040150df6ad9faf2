#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace disperse {

struct CliOptions {
  std::string config_path;
  std::optional<std::string> output_dir;  // overrides output.path
  bool quiet = false;
};

/// Exit codes: 0 all points converged, 1 config or validation error,
/// 2 some point failed (partial output is still written).
int run_command(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Solver vs oracle table per exact branch. 0 when every subsampled k has
/// rel_err_omega < 2% and matching damping sign, 2 otherwise, 1 on config
/// errors (including a disabled oracle).
int compare_command(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Worker count from DISPERSE_THREADS (unset or 0 means hardware concurrency).
unsigned thread_count();

int cli_main(int argc, char** argv);

}  // namespace disperse
