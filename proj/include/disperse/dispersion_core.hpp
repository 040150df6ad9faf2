#pragma once

#include <complex>
#include <optional>
#include <string_view>

#include "disperse/quadrature.hpp"
#include "disperse/quantum_stats.hpp"

namespace disperse {

/// Laplace variable s = eta + i omega. Perturbations evolve as exp(i k z + s t),
/// so eta < 0 is damping.
struct ComplexRate {
  double eta = 0.0;    // 1/s
  double omega = 0.0;  // rad/s

  std::complex<double> s() const { return {eta, omega}; }
  double v_phi(double k) const { return omega / k; }
  /// v_F / v_phi (v_ch / v_phi for non-degenerate gases).
  double r(double k, double v_ch) const { return v_ch * k / omega; }
  double epsilon() const { return eta / omega; }

  static ComplexRate from_r_epsilon(double r, double epsilon, double k, double v_ch) {
    const double omega = k * v_ch / r;
    return {epsilon * omega, omega};
  }
};

enum class BranchId {
  ExactDegenerate,
  ExactWeak,
  ExactQuadrature,
  QuantumLangmuir,
  C1Corrected,
  DegenerateBohmGross,
  ZeroSound,
  WeakBiquadratic,
  WeakSimple,
};

std::string_view to_string(BranchId id) noexcept;
std::optional<BranchId> branch_from_string(std::string_view name) noexcept;

/// Exact branches are roots of a residual; the rest are closed-form formulas.
bool is_exact(BranchId id) noexcept;
bool requires_degenerate(BranchId id) noexcept;
bool requires_weak(BranchId id) noexcept;

/// Throws InvalidArgument if `id` cannot be evaluated for this gas.
void check_branch_compatible(BranchId id, const DerivedScales& scales);

/// Real and imaginary equations of the fully degenerate dispersion relation
/// in (r, epsilon) variables. `region_flag` reports U(r^2 + eps^2 - 1).
struct ResidualValue {
  double real_part = 0.0;
  double imag_part = 0.0;
  bool region_flag = false;
};

/// Omega_p^2 + (hbar^2 / 4 m^2) k^4, Bohm factor included.
double coefficient_C1(double k, const DerivedScales& scales);

/// Fully degenerate residual. real_part is 1 minus the right-hand side of
/// the real equation; imag_part is the imaginary equation itself. The
/// half-angle arctangent is the principal value, continued by +-pi/2 where
/// 1 + eps^2 - r^2 < 0 (and taken as the principal value 0 on eps = 0).
/// Throws SingularInput at the resonance r = 1, eps = 0.
ResidualValue residual_degenerate(double r, double epsilon, double k, const DerivedScales& scales);

/// Maps a degenerate residual onto the value of the dispersion function
/// D(s) = 1 - (C1/k^2 n0) int f_z'(w) dw / (w - i s/k).
std::complex<double> degenerate_to_dispersion(const ResidualValue& value, double r, double k,
                                              const DerivedScales& scales);

struct WeakResidual {
  std::complex<double> value;
  int terms = 0;
};

/// Weakly degenerate residual from the erfc series, returned as D(s) (one
/// minus the series side over its (2/3) v_ch^3 scale). Each term is
/// evaluated with scaled_erfc at complex argument, so the value is the
/// Landau-continued dispersion function for any sign of eta.
WeakResidual residual_weak_eval(double k, std::complex<double> s, const SpeciesParams& species,
                                double alpha, const DerivedScales& scales);

inline std::complex<double> residual_weak(double k, std::complex<double> s,
                                          const SpeciesParams& species, double alpha,
                                          const DerivedScales& scales) {
  return residual_weak_eval(k, s, species, alpha, scales).value;
}

/// D(s) by direct adaptive quadrature of the velocity integral, independent
/// of the closed-form and series routes. Uses the degenerate step
/// distribution when scales.degenerate, otherwise the Fermi/Bose occupation
/// at alpha = scales.fugacity.
std::complex<double> residual_quadrature(double k, std::complex<double> s,
                                         const SpeciesParams& species,
                                         const DerivedScales& scales,
                                         const QuadratureOptions& options = {});

double omega_quantum_langmuir(double k, const DerivedScales& scales);
double omega_c1_corrected(double k, const DerivedScales& scales);
double omega_degenerate_bohm_gross(double k, const DerivedScales& scales);
double omega_zero_sound(double k, const DerivedScales& scales);
double omega_weak_biquadratic(double k, const SpeciesParams& species, const DerivedScales& scales);
double omega_weak_simple(double k, const SpeciesParams& species, const DerivedScales& scales);

/// Closed-form frequency for any non-exact branch.
double closed_form_omega(BranchId id, double k, const SpeciesParams& species,
                         const DerivedScales& scales);

}  // namespace disperse
