#pragma once

#include <cmath>
#include <complex>

#include "disperse/constants.hpp"
#include "disperse/special_functions.hpp"

namespace disperse {

/// Physical description of a single-species gas, SI units throughout.
struct SpeciesParams {
  double mass = constants::electron_mass;       // kg
  double charge = -constants::elementary_charge; // C, may be zero
  int degeneracy = 2;                            // statistical weight gamma
  double density = 1e28;                         // n0, m^-3
  double temperature = 0.0;                      // K
  Statistics statistics = Statistics::Fermi;
  /// Treat a Fermi gas as fully degenerate (step occupation) even at T > 0.
  bool fully_degenerate = false;
};

/// Throws InvalidArgument if the parameters violate the basic invariants
/// (positive mass and density, degeneracy >= 1, T >= 0, T = 0 only for Fermi).
void validate(const SpeciesParams& species);

/// True when the fully degenerate (step occupation) path applies.
inline bool uses_degenerate_path(const SpeciesParams& s) {
  return s.statistics == Statistics::Fermi && (s.temperature == 0.0 || s.fully_degenerate);
}

struct ScaleOptions {
  /// Multiplies the Bohm term hbar^2 k^4 / 4 m^2; 0 switches it off.
  double bohm_factor = 1.0;
};

struct DerivedScales {
  double omega_p = 0.0;        // rad/s
  double v_ch = 0.0;           // m/s; the Fermi velocity for fermions
  double fugacity = 1.0;       // alpha; 1 is bookkeeping for the degenerate path
  double v_th_sq = 0.0;        // m^2/s^2
  double lambda_quantum = 0.0; // hbar^2 / (4 m^2) times the Bohm factor, m^4/s^2
  bool degenerate = false;
};

struct FugacityResult {
  double alpha = 0.0;
  double target = 0.0;  // (n0/gamma) h^3 / (2 pi m k_B T)^(3/2)
  bool at_critical = false;
  int iterations = 0;
};

double plasma_frequency(const SpeciesParams& species);
double characteristic_velocity(const SpeciesParams& species);

/// Right-hand side of the density normalization zeta_{3/2}(alpha) = target.
double degeneracy_target(const SpeciesParams& species);

/// Inverts zeta_{3/2}(alpha) = target by bisection in log(alpha). Throws
/// DegeneracyOutOfRange when no alpha < 1 exists (bosons below T_c, or
/// fermions needing the fully degenerate treatment). A boson target equal to
/// zeta(3/2) returns alpha = 1 flagged at_critical.
FugacityResult fugacity_from_density(const SpeciesParams& species);

/// (3 k_B T / m) zeta_{5/2}(alpha) / zeta_{3/2}(alpha).
double thermal_velocity_sq(const SpeciesParams& species, double alpha);

DerivedScales derive_scales(const SpeciesParams& species, ScaleOptions options = {});

/// gamma m^3 / h^3, the phase-space density prefactor.
inline double phase_space_prefactor(const SpeciesParams& s) {
  const double ratio = s.mass / constants::planck;
  return s.degeneracy * ratio * ratio * ratio;
}

/// Reduced distribution f_z(w): the occupation integrated over the two
/// transverse velocity components.
double reduced_fz(double w, const SpeciesParams& species, double alpha);

/// df_z/dw = -2 pi gamma (m/h)^3 w / (alpha^-1 exp(m w^2 / 2 k_B T) +- 1).
/// Templated so the same expression serves real velocities and the complex
/// pole location needed by the Landau continuation.
template <typename Scalar>
Scalar reduced_fz_derivative(Scalar w, const SpeciesParams& species, double alpha) {
  using std::exp;
  const double a = phase_space_prefactor(species);
  const double beta = species.mass / (2.0 * constants::boltzmann * species.temperature);
  const Scalar x = alpha * exp(-beta * w * w);  // alpha exp(-E/k_B T)
  const double sign = species.statistics == Statistics::Fermi ? 1.0 : -1.0;
  return -2.0 * constants::pi * a * w * x / (1.0 + sign * x);
}

/// Fully degenerate limit: -2 pi gamma (m/h)^3 v U(v_F^2 - v^2), U(0) = 1.
double degenerate_fz_derivative(double v, const SpeciesParams& species);

/// Fully degenerate reduced distribution pi gamma (m/h)^3 (v_F^2 - v^2) U(...).
double degenerate_fz(double v, const SpeciesParams& species);

}  // namespace disperse
