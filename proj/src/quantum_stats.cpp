#include "disperse/quantum_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "disperse/error.hpp"

namespace disperse {

using namespace constants;

void validate(const SpeciesParams& s) {
  if (!(s.mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  if (!(s.density > 0.0)) throw Error(ErrorKind::InvalidArgument, "density must be positive");
  if (s.degeneracy < 1) throw Error(ErrorKind::InvalidArgument, "degeneracy must be >= 1");
  if (!(s.temperature >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "temperature must be non-negative");
  }
  if (!std::isfinite(s.charge)) throw Error(ErrorKind::InvalidArgument, "charge must be finite");
  if (s.statistics == Statistics::Bose && s.temperature == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "T = 0 is only permitted for Fermi statistics");
  }
}

double plasma_frequency(const SpeciesParams& s) {
  return std::sqrt(s.charge * s.charge * s.density / (s.mass * vacuum_permittivity));
}

double characteristic_velocity(const SpeciesParams& s) {
  const double m3 = s.mass * s.mass * s.mass;
  const double h3 = planck * planck * planck;
  return std::cbrt(3.0 * s.density * h3 / (4.0 * pi * s.degeneracy * m3));
}

double degeneracy_target(const SpeciesParams& s) {
  const double h3 = planck * planck * planck;
  return (s.density / s.degeneracy) * h3 /
         std::pow(2.0 * pi * s.mass * boltzmann * s.temperature, 1.5);
}

FugacityResult fugacity_from_density(const SpeciesParams& species) {
  validate(species);
  if (!(species.temperature > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "fugacity requires T > 0");
  }
  FugacityResult out;
  const double target = degeneracy_target(species);
  out.target = target;
  const Statistics stats = species.statistics;
  const double ceiling = zeta_pm(1.5, 1.0, stats);

  if (stats == Statistics::Bose) {
    const double rel = (target - ceiling) / ceiling;
    if (std::abs(rel) <= 1e-12) {
      out.alpha = 1.0;
      out.at_critical = true;
      return out;
    }
    if (rel > 0.0) {
      throw Error(ErrorKind::DegeneracyOutOfRange,
                  "fugacity solve hit condensation bound: zeta_{3/2} target " +
                      std::to_string(target) + " exceeds zeta(3/2) = " +
                      std::to_string(ceiling) + " (gas below T_c)");
    }
  } else if (target >= ceiling) {
    throw Error(ErrorKind::DegeneracyOutOfRange,
                "fermion zeta_{3/2} target " + std::to_string(target) +
                    " needs alpha >= 1; use the fully degenerate treatment");
  }

  // zeta_{3/2} is increasing in alpha. Brackets: fermions have zeta <= alpha,
  // bosons alpha <= zeta <= alpha / (1 - alpha).
  double lo = stats == Statistics::Fermi ? target : target / (1.0 + target);
  double hi = stats == Statistics::Fermi ? 1.0 : std::min(target, 1.0);
  double log_lo = std::log(lo) - 1e-12;
  double log_hi = std::log(hi);
  double alpha = lo;
  for (int it = 1; it <= 200; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    alpha = std::exp(mid);
    const double value = zeta_pm(1.5, alpha, stats);
    out.iterations = it;
    if (std::abs(value - target) < 1e-12 * target) break;
    if (value < target) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
    if (log_hi - log_lo < 1e-17) break;
  }
  out.alpha = alpha;
  return out;
}

double thermal_velocity_sq(const SpeciesParams& s, double alpha) {
  const double classical = 3.0 * boltzmann * s.temperature / s.mass;
  return classical * zeta_pm(2.5, alpha, s.statistics) / zeta_pm(1.5, alpha, s.statistics);
}

DerivedScales derive_scales(const SpeciesParams& species, ScaleOptions options) {
  validate(species);
  DerivedScales d;
  d.omega_p = plasma_frequency(species);
  d.v_ch = characteristic_velocity(species);
  d.lambda_quantum = options.bohm_factor * hbar * hbar / (4.0 * species.mass * species.mass);
  d.degenerate = uses_degenerate_path(species);
  if (d.degenerate) {
    d.fugacity = 1.0;
    // mean-square velocity of the filled Fermi sphere, 3 <v_z^2> = (3/5) v_F^2
    d.v_th_sq = 0.6 * d.v_ch * d.v_ch;
    return d;
  }
  const FugacityResult fug = fugacity_from_density(species);
  if (fug.at_critical) {
    throw Error(ErrorKind::DegeneracyOutOfRange,
                "fugacity solve hit condensation bound: Bose gas exactly at T_c");
  }
  d.fugacity = fug.alpha;
  d.v_th_sq = thermal_velocity_sq(species, fug.alpha);
  return d;
}

double reduced_fz(double w, const SpeciesParams& s, double alpha) {
  const double kt_over_m = boltzmann * s.temperature / s.mass;
  const double x = alpha * std::exp(-w * w / (2.0 * kt_over_m));
  const double a = phase_space_prefactor(s);
  const double occupation_log =
      s.statistics == Statistics::Fermi ? std::log1p(x) : -std::log1p(-x);
  return 2.0 * pi * a * kt_over_m * occupation_log;
}

double degenerate_fz_derivative(double v, const SpeciesParams& s) {
  const double vf = characteristic_velocity(s);
  if (vf * vf - v * v < 0.0) return 0.0;
  return -2.0 * pi * phase_space_prefactor(s) * v;
}

double degenerate_fz(double v, const SpeciesParams& s) {
  const double vf = characteristic_velocity(s);
  const double gap = vf * vf - v * v;
  if (gap < 0.0) return 0.0;
  return pi * phase_space_prefactor(s) * gap;
}

}  // namespace disperse
