#pragma once

#include <Eigen/Core>
#include <iosfwd>

#include "disperse/quantum_stats.hpp"

namespace disperse {

enum class InitShape { UniformDensityKick, MaxwellianShaped };

struct OracleConfig {
  /// Grid half-width as a multiple of max(v_ch, v_th); 0 picks the default
  /// (8, or 1.5 v_F for the fully degenerate gas).
  double v_max_factor = 0.0;
  int n_v = 4096;
  double dt_fraction = 1.0 / 200.0;  // of 2 pi / omega_guess
  double t_end_periods = 50.0;
  InitShape init_shape = InitShape::MaxwellianShaped;
  /// Relative density perturbation N(0) / n0.
  double amplitude = 1e-6;
  /// Width of the tanh edge replacing the Fermi step, in units of v_F.
  double edge_width = 1.0 / 200.0;
  /// Frequency used to size dt and t_end; 0 means the closed-form estimate.
  double omega_guess = 0.0;

  void validate() const;
};

struct OracleRun {
  double k = 0.0;
  double dt = 0.0;          // s
  double omega_guess = 0.0; // rad/s
  double v_max = 0.0;       // m/s
  Eigen::VectorXd times;          // s
  Eigen::VectorXcd density;       // N(t), m^-3
  Eigen::VectorXd velocity;       // grid, m/s
  Eigen::VectorXcd amplitude;     // phi(v) at the last step, m^-4 s
};

struct OracleFit {
  double omega = 0.0;
  double eta = 0.0;
  double eta_stderr = 0.0;    // standard error of the envelope slope
  double fit_residual = 0.0;  // normalized RMS of the damped-sinusoid model
};

/// Integrates the linearized kinetic equation for one Fourier mode k on a
/// uniform velocity grid (trapezoid moments, integrating-factor RK4). The
/// coupling and the Bohm force follow scales (lambda_quantum carries the
/// hook). Throws GridResonanceUnderresolved or NumericalBlowup.
OracleRun evolve_mode(double k, const SpeciesParams& species, const DerivedScales& scales,
                      const OracleConfig& config = {});

/// Frequency from the windowed spectrum peak, damping from the slope of the
/// demodulated envelope, both over the last 80% of the record. Throws
/// FitAmbiguous when a second peak is within 3 dB of the main one.
OracleFit fit_omega_eta(const OracleRun& run);

/// Columns t, re_N, im_N, abs_N.
void write_density_csv(const OracleRun& run, std::ostream& out);

}  // namespace disperse
