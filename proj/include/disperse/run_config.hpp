#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "disperse/dispersion_core.hpp"
#include "disperse/kinetic_oracle.hpp"
#include "disperse/root_solver.hpp"

namespace disperse {

enum class Spacing { Linear, Log };
enum class Units { SI, Reduced };
enum class SolveMode { Continuation, Dominant };

struct SweepConfig {
  double k_min = 0.0;
  double k_max = 0.0;
  int n_points = 100;
  Spacing spacing = Spacing::Linear;
  /// Reduced: k in Omega_p / v_ch, rates in Omega_p. For a neutral gas the
  /// units are 2 m v_ch / hbar and v_ch times that.
  Units units = Units::SI;
};

struct OracleSection {
  bool enabled = false;
  OracleConfig config{};
  int subsample = 1;
  bool dump_density = false;
};

struct OutputConfig {
  std::string path = ".";
  int precision = 17;  // significant digits
};

struct RunConfig {
  SpeciesParams species{};
  SweepConfig sweep{};
  std::vector<BranchId> branches;
  SolverConfig solver{};
  SolveMode mode = SolveMode::Continuation;
  OracleSection oracle{};
  bool bohm_term = true;
  OutputConfig output{};
};

/// Parses the sectioned key = value format. Unknown sections and keys are
/// errors, except result.* sections written into summaries. Throws
/// ConfigError naming the line or field.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Structural checks (k range, branch list, solver and oracle fields).
void validate(const RunConfig& config);

/// The fully resolved config in the same format, defaults filled in.
void write_config(const RunConfig& config, std::ostream& out);

ScaleOptions scale_options(const RunConfig& config);

/// SI wavenumber per reduced unit (1 for SI configs).
double k_unit(const RunConfig& config, const DerivedScales& scales);
/// SI rate per reduced unit (1 for SI configs).
double rate_unit(const RunConfig& config, const DerivedScales& scales);

/// The k grid in SI.
std::vector<double> k_grid(const RunConfig& config, const DerivedScales& scales);

}  // namespace disperse
