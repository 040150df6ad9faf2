#pragma once

#include <array>
#include <optional>
#include <vector>

#include "disperse/dispersion_core.hpp"

namespace disperse {

struct SolverConfig {
  double abs_tol = 1e-10;
  int max_iter = 100;
  double fd_step = 1e-7;  // relative
  bool continuation = true;
  QuadratureOptions quadrature{};

  void validate() const;
};

struct DispersionResult {
  double k = 0.0;
  BranchId branch = BranchId::ExactDegenerate;
  ComplexRate rate;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  bool damped = false;
  bool region_flag = false;
};

/// Residual 2-vector of an exact branch at (k, rate): (real, imag) of the
/// degenerate system for ExactDegenerate, of D(s) otherwise.
std::array<double, 2> exact_residual(BranchId branch, double k, const ComplexRate& rate,
                                     const SpeciesParams& species, const DerivedScales& scales,
                                     const QuadratureOptions& quadrature = {});

/// |D(s)| through the adaptive quadrature path, for independent
/// back-substitution of any root.
double quadrature_residual_norm(double k, const ComplexRate& rate, const SpeciesParams& species,
                                const DerivedScales& scales,
                                const QuadratureOptions& quadrature = {});

/// Damped Newton from `seed`. Closed-form branches return the formula value
/// with the residual of the matching exact branch at that point. Throws
/// NoConvergence, SingularJacobian, or whatever the residual raises.
DispersionResult solve_at_k(double k, BranchId branch, const SpeciesParams& species,
                            const DerivedScales& scales, const ComplexRate& seed,
                            const SolverConfig& config = {});

/// Closed-form starting point for an exact branch: the Bohm-Gross type
/// relation of the gas (zero sound when that one sits on the resonance).
ComplexRate physics_seed(BranchId branch, double k, const SpeciesParams& species,
                         const DerivedScales& scales);

/// Continuation sweep over a strictly increasing k grid. The first point
/// tries the physics seed, then the Langmuir value, then 1.2x; later points
/// start from the previous root (or from fresh seeds when continuation is
/// off). Unconverged points are kept with converged = false.
std::vector<DispersionResult> sweep(const std::vector<double>& k_grid, BranchId branch,
                                    const SpeciesParams& species, const DerivedScales& scales,
                                    const SolverConfig& config = {});

/// Launches from every closed-form seed available to the gas and returns the
/// converged root with the largest eta; nullopt if none converged.
std::optional<DispersionResult> solve_dominant(double k, BranchId branch,
                                               const SpeciesParams& species,
                                               const DerivedScales& scales,
                                               const SolverConfig& config = {});

}  // namespace disperse
