#include "disperse/root_solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "disperse/error.hpp"

namespace disperse {

namespace {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

constexpr int kMaxHalvings = 20;
constexpr double kMaxCondition = 1e12;

// Unknowns are (r, eps) for the degenerate system and (eta, omega) / scale
// otherwise, where scale is Omega_p (k v_ch for a neutral gas).
struct Problem {
  BranchId branch;
  double k;
  const SpeciesParams& species;
  const DerivedScales& scales;
  const QuadratureOptions& quadrature;
  bool degenerate_vars;
  double rate_scale;

  ComplexRate to_rate(const Vec2& x) const {
    if (degenerate_vars) return ComplexRate::from_r_epsilon(x(0), x(1), k, scales.v_ch);
    return {x(0) * rate_scale, x(1) * rate_scale};
  }

  Vec2 from_rate(const ComplexRate& rate) const {
    if (degenerate_vars) return {rate.r(k, scales.v_ch), rate.epsilon()};
    return {rate.eta / rate_scale, rate.omega / rate_scale};
  }

  // Iterates the residual cannot or must not be evaluated at.
  bool admissible(const Vec2& x) const {
    if (!x.allFinite()) return false;
    if (degenerate_vars) {
      if (!(x(0) > 0.0)) return false;
      return !(std::abs(x(0) - 1.0) < 1e-6 && std::abs(x(1)) < 1e-6);  // resonance guard
    }
    return x(1) > 0.0;
  }

  Vec2 residual(const Vec2& x) const {
    const auto f = exact_residual(branch, k, to_rate(x), species, scales, quadrature);
    return {f[0], f[1]};
  }

  Vec2 steps(const Vec2& x, double fd_step) const {
    if (degenerate_vars) {
      double hr = fd_step * x(0);
      if (std::abs(x(1)) < 1e-3) hr = std::min(hr, 0.25 * std::abs(1.0 - x(0)));
      return {std::max(hr, 1e-14 * x(0)), fd_step * std::max(std::abs(x(1)), 0.1)};
    }
    const double size = x.norm();
    return {fd_step * size, fd_step * size};
  }
};

struct NewtonOutcome {
  Vec2 x;
  Vec2 f;
  int iterations = 0;
  bool converged = false;
  ErrorKind failure = ErrorKind::NoConvergence;
  std::string message;
};

bool is_recoverable(ErrorKind kind) {
  return kind == ErrorKind::SingularInput || kind == ErrorKind::NonConvergent ||
         kind == ErrorKind::QuadratureFailure;
}

NewtonOutcome newton(const Problem& p, Vec2 x, const SolverConfig& config) {
  NewtonOutcome out;
  out.x = x;
  if (!p.admissible(x)) {
    out.failure = ErrorKind::SingularInput;
    out.message = "seed is outside the admissible region";
    return out;
  }
  Vec2 f = p.residual(x);
  out.f = f;
  double norm = f.norm();
  // full steps taken past the tolerance; they settle eta, whose signal is
  // far below abs_tol when the damping is weak
  int polish = 2;
  for (int it = 0; it <= config.max_iter; ++it) {
    out.iterations = it;
    if (norm < config.abs_tol) {
      out.converged = true;
      if (polish-- == 0) return out;
    } else if (it == config.max_iter) {
      break;
    }

    const Vec2 h = p.steps(x, config.fd_step);
    Mat2 jac;
    for (int c = 0; c < 2; ++c) {
      Vec2 xs = x;
      xs(c) += h(c);
      jac.col(c) = (p.residual(xs) - f) / h(c);
    }
    const Eigen::JacobiSVD<Mat2> svd(jac);
    const auto sigma = svd.singularValues();
    if (!(sigma(1) > 0.0) || sigma(0) / sigma(1) > kMaxCondition) {
      out.failure = ErrorKind::SingularJacobian;
      out.message = "Jacobian condition estimate above 1e12";
      return out;
    }
    // Cramer's rule keeps a zero eps-step exactly zero on the undamped axis.
    const double det = jac(0, 0) * jac(1, 1) - jac(0, 1) * jac(1, 0);
    const Vec2 dx{-(jac(1, 1) * f(0) - jac(0, 1) * f(1)) / det,
                  -(jac(0, 0) * f(1) - jac(1, 0) * f(0)) / det};

    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings && !accepted; ++halving, lambda *= 0.5) {
      const Vec2 trial = x + lambda * dx;
      if (!p.admissible(trial)) continue;
      Vec2 ft;
      try {
        ft = p.residual(trial);
      } catch (const Error& e) {
        if (is_recoverable(e.kind())) continue;
        throw;
      }
      if (ft.allFinite() && (ft.norm() < norm || (out.converged && ft.norm() <= norm))) {
        x = trial;
        f = ft;
        norm = ft.norm();
        accepted = true;
      }
    }
    out.x = x;
    out.f = f;
    if (!accepted && out.converged) return out;
    if (!accepted) {
      out.iterations = it + 1;
      out.message = "line search stalled at residual " + std::to_string(norm);
      return out;
    }
  }
  out.message = "iteration limit reached at residual " + std::to_string(norm);
  return out;
}

Problem make_problem(BranchId branch, double k, const SpeciesParams& species,
                     const DerivedScales& scales, const QuadratureOptions& quadrature) {
  const bool deg_vars = branch == BranchId::ExactDegenerate;
  const double scale = scales.omega_p > 0.0 ? scales.omega_p : k * scales.v_ch;
  return {branch, k, species, scales, quadrature, deg_vars, scale};
}

DispersionResult make_result(const Problem& p, const NewtonOutcome& o) {
  DispersionResult res;
  res.k = p.k;
  res.branch = p.branch;
  res.rate = p.to_rate(o.x);
  res.residual_norm = o.f.norm();
  res.converged = o.converged;
  res.iterations = o.iterations;
  res.damped = res.rate.eta < 0.0;
  const double r = res.rate.r(p.k, p.scales.v_ch);
  const double eps = res.rate.epsilon();
  res.region_flag = r * r + eps * eps >= 1.0;
  return res;
}

NewtonOutcome attempt(const Problem& p, const ComplexRate& seed, const SolverConfig& config) {
  try {
    return newton(p, p.from_rate(seed), config);
  } catch (const Error& e) {
    NewtonOutcome o;
    o.x = p.from_rate(seed);
    o.f = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
    o.failure = e.kind();
    o.message = e.what();
    return o;
  }
}

DispersionResult closed_form_result(BranchId branch, double k, const SpeciesParams& species,
                                    const DerivedScales& scales,
                                    const QuadratureOptions& quadrature) {
  DispersionResult res;
  res.k = k;
  res.branch = branch;
  res.rate = {0.0, closed_form_omega(branch, k, species, scales)};
  const BranchId exact = requires_degenerate(branch) ? BranchId::ExactDegenerate
                                                     : BranchId::ExactWeak;
  try {
    const auto f = exact_residual(exact, k, res.rate, species, scales, quadrature);
    res.residual_norm = std::hypot(f[0], f[1]);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularInput) throw;
    res.residual_norm = std::numeric_limits<double>::infinity();  // formula sits on r = 1
  }
  res.converged = std::isfinite(res.rate.omega);
  res.iterations = 0;
  res.damped = false;
  const double r = res.rate.r(k, scales.v_ch);
  res.region_flag = r * r >= 1.0;
  return res;
}

std::vector<ComplexRate> fallback_seeds(BranchId branch, double k, const SpeciesParams& species,
                                        const DerivedScales& scales) {
  const ComplexRate physics = physics_seed(branch, k, species, scales);
  const ComplexRate langmuir{0.0, omega_quantum_langmuir(k, scales)};
  const ComplexRate scaled{1.2 * physics.eta, 1.2 * physics.omega};
  return {physics, langmuir, scaled};
}

}  // namespace

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver abs_tol must be > 0");
  if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "solver max_iter must be >= 1");
  if (!(fd_step > 0.0 && fd_step < 1e-3)) {
    throw Error(ErrorKind::InvalidArgument, "solver fd_step must lie in (0, 1e-3)");
  }
}

std::array<double, 2> exact_residual(BranchId branch, double k, const ComplexRate& rate,
                                     const SpeciesParams& species, const DerivedScales& scales,
                                     const QuadratureOptions& quadrature) {
  switch (branch) {
    case BranchId::ExactDegenerate: {
      const auto v = residual_degenerate(rate.r(k, scales.v_ch), rate.epsilon(), k, scales);
      return {v.real_part, v.imag_part};
    }
    case BranchId::ExactWeak: {
      const auto d = residual_weak(k, rate.s(), species, scales.fugacity, scales);
      return {d.real(), d.imag()};
    }
    case BranchId::ExactQuadrature: {
      const auto d = residual_quadrature(k, rate.s(), species, scales, quadrature);
      return {d.real(), d.imag()};
    }
    default:
      break;
  }
  throw Error(ErrorKind::InvalidArgument,
              std::string(to_string(branch)) + " has no exact residual");
}

double quadrature_residual_norm(double k, const ComplexRate& rate, const SpeciesParams& species,
                                const DerivedScales& scales,
                                const QuadratureOptions& quadrature) {
  return std::abs(residual_quadrature(k, rate.s(), species, scales, quadrature));
}

ComplexRate physics_seed(BranchId branch, double k, const SpeciesParams& species,
                         const DerivedScales& scales) {
  if (scales.degenerate) {
    double omega = omega_degenerate_bohm_gross(k, scales);
    if (k * scales.v_ch / omega >= 1.0) omega = omega_zero_sound(k, scales);
    return {0.0, omega};
  }
  if (branch == BranchId::ExactDegenerate) {
    throw Error(ErrorKind::InvalidArgument, "ExactDegenerate needs a fully degenerate Fermi gas");
  }
  return {0.0, omega_weak_simple(k, species, scales)};
}

DispersionResult solve_at_k(double k, BranchId branch, const SpeciesParams& species,
                            const DerivedScales& scales, const ComplexRate& seed,
                            const SolverConfig& config) {
  config.validate();
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  check_branch_compatible(branch, scales);
  if (!is_exact(branch)) return closed_form_result(branch, k, species, scales, config.quadrature);
  if (!(seed.omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "seed needs omega > 0");

  const Problem p = make_problem(branch, k, species, scales, config.quadrature);
  const NewtonOutcome o = newton(p, p.from_rate(seed), config);
  if (!o.converged) throw Error(o.failure, o.message);
  return make_result(p, o);
}

std::vector<DispersionResult> sweep(const std::vector<double>& k_grid, BranchId branch,
                                    const SpeciesParams& species, const DerivedScales& scales,
                                    const SolverConfig& config) {
  config.validate();
  check_branch_compatible(branch, scales);
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (!(k_grid[i] > 0.0) || (i > 0 && !(k_grid[i] > k_grid[i - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "k grid must be positive and strictly increasing");
    }
  }
  std::vector<DispersionResult> out;
  out.reserve(k_grid.size());
  if (!is_exact(branch)) {
    for (double k : k_grid) {
      out.push_back(closed_form_result(branch, k, species, scales, config.quadrature));
    }
    return out;
  }

  std::optional<ComplexRate> previous;
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    const double k = k_grid[i];
    const Problem p = make_problem(branch, k, species, scales, config.quadrature);
    std::vector<ComplexRate> seeds;
    if (config.continuation && previous) seeds.push_back(*previous);
    for (const auto& s : fallback_seeds(branch, k, species, scales)) seeds.push_back(s);

    NewtonOutcome best;
    bool have_best = false;
    for (const auto& seed : seeds) {
      NewtonOutcome o = attempt(p, seed, config);
      if (o.converged) {
        best = o;
        have_best = true;
        break;
      }
      if (!have_best || (o.f.allFinite() && !(o.f.norm() >= best.f.norm()))) {
        best = o;
        have_best = true;
      }
    }
    if (!best.converged && i == 0) {
      throw Error(ErrorKind::SeedFailure,
                  "first sweep point did not converge from any seed: " + best.message);
    }
    out.push_back(make_result(p, best));
    if (best.converged) previous = out.back().rate;
  }
  return out;
}

std::optional<DispersionResult> solve_dominant(double k, BranchId branch,
                                               const SpeciesParams& species,
                                               const DerivedScales& scales,
                                               const SolverConfig& config) {
  config.validate();
  check_branch_compatible(branch, scales);
  if (!is_exact(branch)) return closed_form_result(branch, k, species, scales, config.quadrature);

  std::vector<ComplexRate> seeds = fallback_seeds(branch, k, species, scales);
  const BranchId closed[] = {BranchId::QuantumLangmuir, BranchId::C1Corrected,
                             BranchId::DegenerateBohmGross, BranchId::ZeroSound,
                             BranchId::WeakBiquadratic, BranchId::WeakSimple};
  for (BranchId id : closed) {
    if (scales.degenerate ? requires_weak(id) : requires_degenerate(id)) continue;
    seeds.push_back({0.0, closed_form_omega(id, k, species, scales)});
  }
  const Problem p = make_problem(branch, k, species, scales, config.quadrature);
  std::optional<DispersionResult> best;
  for (const auto& seed : seeds) {
    const NewtonOutcome o = attempt(p, seed, config);
    if (!o.converged) continue;
    DispersionResult r = make_result(p, o);
    if (!best || r.rate.eta > best->rate.eta) best = r;
  }
  return best;
}

}  // namespace disperse
