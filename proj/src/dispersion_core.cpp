#include "disperse/dispersion_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "disperse/constants.hpp"
#include "disperse/error.hpp"

namespace disperse {

using constants::pi;
using cplx = std::complex<double>;

namespace {

constexpr std::array<std::pair<BranchId, std::string_view>, 9> kBranchNames = {{
    {BranchId::ExactDegenerate, "ExactDegenerate"},
    {BranchId::ExactWeak, "ExactWeak"},
    {BranchId::ExactQuadrature, "ExactQuadrature"},
    {BranchId::QuantumLangmuir, "QuantumLangmuir"},
    {BranchId::C1Corrected, "C1Corrected"},
    {BranchId::DegenerateBohmGross, "DegenerateBohmGross"},
    {BranchId::ZeroSound, "ZeroSound"},
    {BranchId::WeakBiquadratic, "WeakBiquadratic"},
    {BranchId::WeakSimple, "WeakSimple"},
}};

// atanh(r) - r without the cancellation at small r.
double atanh_minus_identity(double r) {
  if (r >= 0.1) return std::atanh(r) - r;
  const double r2 = r * r;
  double term = r * r2;
  double sum = 0.0;
  for (int n = 1; n < 40; ++n) {
    const double contrib = term / (2 * n + 1);
    sum += contrib;
    if (contrib < 1e-18 * sum) break;
    term *= r2;
  }
  return sum;
}

// Omega_p^2 + k^2 v^2 + lambda k^4. Shared by both three-term relations so
// that identical inputs give bit-identical frequencies.
double three_term_omega(double omega_p_sq, double k, double velocity_sq, double lambda) {
  const double k2 = k * k;
  return std::sqrt(omega_p_sq + k2 * velocity_sq + lambda * k2 * k2);
}

}  // namespace

std::string_view to_string(BranchId id) noexcept {
  for (const auto& [branch, name] : kBranchNames) {
    if (branch == id) return name;
  }
  return "Unknown";
}

std::optional<BranchId> branch_from_string(std::string_view name) noexcept {
  for (const auto& [branch, label] : kBranchNames) {
    if (label == name) return branch;
  }
  return std::nullopt;
}

bool is_exact(BranchId id) noexcept {
  return id == BranchId::ExactDegenerate || id == BranchId::ExactWeak ||
         id == BranchId::ExactQuadrature;
}

bool requires_degenerate(BranchId id) noexcept {
  switch (id) {
    case BranchId::ExactDegenerate:
    case BranchId::QuantumLangmuir:
    case BranchId::C1Corrected:
    case BranchId::DegenerateBohmGross:
    case BranchId::ZeroSound:
      return true;
    default:
      return false;
  }
}

bool requires_weak(BranchId id) noexcept {
  return id == BranchId::ExactWeak || id == BranchId::WeakBiquadratic ||
         id == BranchId::WeakSimple;
}

void check_branch_compatible(BranchId id, const DerivedScales& scales) {
  if (requires_degenerate(id) && !scales.degenerate) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(to_string(id)) + " needs a fully degenerate Fermi gas");
  }
  if (requires_weak(id) && !(scales.fugacity < 1.0 && !scales.degenerate)) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(to_string(id)) + " needs a weakly degenerate gas (alpha < 1)");
  }
}

double coefficient_C1(double k, const DerivedScales& scales) {
  const double k2 = k * k;
  return scales.omega_p * scales.omega_p + scales.lambda_quantum * k2 * k2;
}

ResidualValue residual_degenerate(double r, double epsilon, double k,
                                  const DerivedScales& scales) {
  if (!(r > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidArgument, "residual_degenerate needs r > 0 and finite epsilon");
  }
  if (r == 1.0 && epsilon == 0.0) {
    throw Error(ErrorKind::SingularInput, "resonance r = 1, epsilon = 0");
  }
  const double q = coefficient_C1(k, scales) / (k * k * scales.v_ch * scales.v_ch);

  ResidualValue out;
  out.region_flag = r * r + epsilon * epsilon >= 1.0;
  const double step = out.region_flag ? 1.0 : 0.0;

  // bracket = (eps + i) arctan(x) - r with x = r / (eps + i); its real part is
  // (eps/2) arctg(...) - (1/4) ln(...) - r and its imaginary part is
  // (1/2) arctg(...) + (eps/4) ln(...).
  double bracket_re = 0.0;
  double bracket_im = 0.0;
  if (epsilon == 0.0 && r < 1.0) {
    bracket_re = atanh_minus_identity(r);
  } else if (r * r / (1.0 + epsilon * epsilon) < 0.04) {
    // |x| < 0.2: arctan(x) - x = sum_{n>=1} (-1)^n x^(2n+1) / (2n+1)
    const cplx rot{epsilon, 1.0};
    const cplx x = r / rot;
    const cplx x2 = x * x;
    cplx term = x * x2;
    cplx sum{0.0, 0.0};
    double sign = -1.0;
    for (int n = 1; n < 60; ++n) {
      const cplx contrib = sign * term / static_cast<double>(2 * n + 1);
      sum += contrib;
      if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
      term *= x2;
      sign = -sign;
    }
    const cplx b = rot * sum;
    bracket_re = b.real();
    bracket_im = b.imag();
  } else {
    const double x = 1.0 + epsilon * epsilon - r * r;
    const double y = 2.0 * r * epsilon;
    double half_angle = 0.0;  // principal value on epsilon = 0
    if (epsilon != 0.0) {
      half_angle = x != 0.0 ? 0.5 * std::atan(y / x) : 0.25 * pi * (y > 0.0 ? 1.0 : -1.0);
      // continuity across 1 + eps^2 - r^2 = 0 at fixed epsilon
      if (x < 0.0) half_angle += epsilon > 0.0 ? 0.5 * pi : -0.5 * pi;
    }
    // ((1-r)^2 + eps^2) / ((1+r)^2 + eps^2) = 1 - 4r / ((1+r)^2 + eps^2)
    const double log_term =
        0.25 * std::log1p(-4.0 * r / ((1.0 + r) * (1.0 + r) + epsilon * epsilon));
    bracket_re = epsilon * half_angle - log_term - r;
    bracket_im = half_angle + epsilon * log_term;
  }
  out.real_part = 1.0 - (3.0 * q / r) * (bracket_re + pi * epsilon * step);
  out.imag_part = bracket_im + pi * step;
  return out;
}

std::complex<double> degenerate_to_dispersion(const ResidualValue& value, double r, double k,
                                              const DerivedScales& scales) {
  const double q = coefficient_C1(k, scales) / (k * k * scales.v_ch * scales.v_ch);
  return {value.real_part, -(3.0 * q / r) * value.imag_part};
}

WeakResidual residual_weak_eval(double k, std::complex<double> s, const SpeciesParams& species,
                                double alpha, const DerivedScales& scales) {
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "residual_weak needs k > 0");
  if (!(species.temperature > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "residual_weak needs T > 0");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "residual_weak needs 0 < alpha < 1");
  }
  const double kt_over_m = constants::boltzmann * species.temperature / species.mass;
  const double c = std::sqrt(2.0 * kt_over_m);  // 1 / sqrt(m / 2 k_B T)
  const cplx theta = s / (k * c);
  const double v3 = scales.v_ch * scales.v_ch * scales.v_ch;
  const double prefactor =
      coefficient_C1(k, scales) / (k * k) * std::sqrt(2.0 * pi * kt_over_m) / (2.0 / 3.0 * v3);

  // |term_j| <= rho^j (2 + 2 sqrt(pi j) |theta|) / sqrt(j), where rho picks up
  // |exp(theta^2)| from the reflected erfc when Re(theta) < 0.
  double rho = alpha;
  if (theta.real() < 0.0) rho *= std::max(1.0, std::abs(std::exp(theta * theta)));
  if (!(rho < 1.0)) {
    throw Error(ErrorKind::NonConvergent, "weak dispersion series diverges at this s");
  }
  const double sign_step = species.statistics == Statistics::Fermi ? -1.0 : 1.0;
  cplx sum{0.0, 0.0};
  double sign = 1.0;
  double alpha_j = 1.0;
  double rho_j = 1.0;
  constexpr int max_terms = 10000;
  int j = 1;
  for (; j <= max_terms; ++j) {
    alpha_j *= alpha;
    rho_j *= rho;
    const double sqrt_j = std::sqrt(static_cast<double>(j));
    sum += sign * alpha_j / sqrt_j * (scaled_erfc(sqrt_j * theta) - 1.0);
    sign *= sign_step;
    const double tail = rho_j * rho *
                        (2.0 / std::sqrt(j + 1.0) + 2.0 * constants::sqrt_pi * std::abs(theta)) /
                        ((1.0 - rho) * (1.0 - rho));
    if (tail < 1e-16 * std::max(std::abs(sum), 1e-300)) break;
  }
  if (j > max_terms) {
    throw Error(ErrorKind::NonConvergent, "weak dispersion series tail bound not met");
  }
  return {1.0 - prefactor * sum, std::min(j, max_terms)};
}

std::complex<double> residual_quadrature(double k, std::complex<double> s,
                                         const SpeciesParams& species,
                                         const DerivedScales& scales,
                                         const QuadratureOptions& options) {
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "residual_quadrature needs k > 0");
  const cplx i{0.0, 1.0};
  const bool degenerate = scales.degenerate;
  const double alpha = scales.fugacity;

  // Velocities in units of v_unit; fz_prime(u) = f_z'(u v_unit) v_unit^2 / n0.
  const double v_unit =
      degenerate ? scales.v_ch
                 : std::sqrt(2.0 * constants::boltzmann * species.temperature / species.mass);
  const double f_scale = v_unit * v_unit / species.density;
  auto fz_prime = [&](double u) {
    return degenerate ? degenerate_fz_derivative(u * v_unit, species) * f_scale
                      : reduced_fz_derivative(u * v_unit, species, alpha) * f_scale;
  };
  auto fz_prime_analytic = [&](cplx u) -> cplx {
    // analytic continuation off the real axis; the step is continued as the
    // polynomial it equals inside the Fermi sphere
    if (degenerate) {
      return -2.0 * pi * phase_space_prefactor(species) * u * v_unit * f_scale;
    }
    return reduced_fz_derivative(u * v_unit, species, alpha) * f_scale;
  };

  const cplx pole = i * s / (k * v_unit);  // w = i s / k in velocity units
  const double pr = pole.real();
  const double pi_ = pole.imag();

  const double lo = degenerate ? -1.0 : -7.5;
  const double hi = -lo;
  std::vector<double> breaks = {lo};
  if (pr > lo && pr < hi) breaks.push_back(pr);
  breaks.push_back(hi);

  cplx integral{0.0, 0.0};
  const bool near_axis = std::abs(pi_) < 0.5 && pr > lo && pr < hi;
  if (!near_axis) {
    integral = integrate_panels<cplx>([&](double u) { return fz_prime(u) / (u - pole); }, breaks,
                                      options)
                   .value;
  } else {
    // subtract the value at the pole's real projection (degenerate) or at the
    // pole itself (analytic occupation); the remainder is bounded on the axis
    const cplx anchor = degenerate ? cplx{fz_prime(pr), 0.0} : fz_prime_analytic(pole);
    integral = integrate_panels<cplx>(
                   [&](double u) { return (fz_prime(u) - anchor) / (u - pole); }, breaks, options)
                   .value;
    cplx log_term;
    if (pi_ == 0.0) {
      log_term = std::log(std::abs(hi - pr)) - std::log(std::abs(pr - lo));  // principal value
    } else {
      log_term = std::log(cplx{hi - pr, -pi_}) - std::log(cplx{lo - pr, -pi_});
    }
    integral += anchor * log_term;
  }

  if (degenerate) {
    // Residue term exactly as in the degenerate dispersion relation: the full
    // 2 pi i residue wherever U(k^2 v_F^2 + eta^2 - omega^2) is on.
    if (1.0 + pi_ * pi_ - pr * pr >= 0.0) integral += 2.0 * pi * i * fz_prime_analytic(pole);
  } else if (pi_ < 0.0) {
    integral += 2.0 * pi * i * fz_prime_analytic(pole);  // Landau continuation
  } else if (pi_ == 0.0) {
    integral += pi * i * fz_prime_analytic(pole);
  }

  const double scale = coefficient_C1(k, scales) / (k * k * v_unit * v_unit);
  return 1.0 - scale * integral;
}

double omega_quantum_langmuir(double k, const DerivedScales& scales) {
  return std::sqrt(coefficient_C1(k, scales));
}

double omega_c1_corrected(double k, const DerivedScales& scales) {
  const double c1 = coefficient_C1(k, scales);
  const double kv2 = k * k * scales.v_ch * scales.v_ch;
  return std::sqrt(c1 * 0.5 * (1.0 + std::sqrt(1.0 + 12.0 * kv2 / (5.0 * c1))));
}

double omega_degenerate_bohm_gross(double k, const DerivedScales& scales) {
  return three_term_omega(scales.omega_p * scales.omega_p, k, 0.6 * scales.v_ch * scales.v_ch,
                          scales.lambda_quantum);
}

// Near r = 1 with eps = 0 the real equation reads
//   1 = (3 C1 / k^2 v_F^2) (1/r) [ (1/2) ln((1+r)/(1-r)) - r ].
// Setting 1+r ~ 2 and 1/r ~ 1 gives ln(2/(1-r)) = (2/3) k^2 v_F^2 / C1 + 2, so
//   1 - r = 2 exp(-(2/3) k^2 v_F^2 / C1 - 2),
// and v_phi = v_F / r ~ v_F (1 + (1 - r)). The exponent groups as
// -(2/3) k^2 v_F^2 / C1 - 2.
double omega_zero_sound(double k, const DerivedScales& scales) {
  const double c1 = coefficient_C1(k, scales);
  const double kv = k * scales.v_ch;
  return kv * (1.0 + 2.0 * std::exp(-2.0 / 3.0 * kv * kv / c1 - 2.0));
}

double omega_weak_biquadratic(double k, const SpeciesParams&, const DerivedScales& scales) {
  const double c1 = coefficient_C1(k, scales);
  return std::sqrt(0.5 * c1 + 0.5 * std::sqrt(c1 * c1 + 4.0 * k * k * scales.v_th_sq * c1));
}

double omega_weak_simple(double k, const SpeciesParams&, const DerivedScales& scales) {
  return three_term_omega(scales.omega_p * scales.omega_p, k, scales.v_th_sq,
                          scales.lambda_quantum);
}

double closed_form_omega(BranchId id, double k, const SpeciesParams& species,
                         const DerivedScales& scales) {
  switch (id) {
    case BranchId::QuantumLangmuir: return omega_quantum_langmuir(k, scales);
    case BranchId::C1Corrected: return omega_c1_corrected(k, scales);
    case BranchId::DegenerateBohmGross: return omega_degenerate_bohm_gross(k, scales);
    case BranchId::ZeroSound: return omega_zero_sound(k, scales);
    case BranchId::WeakBiquadratic: return omega_weak_biquadratic(k, species, scales);
    case BranchId::WeakSimple: return omega_weak_simple(k, species, scales);
    default: break;
  }
  throw Error(ErrorKind::InvalidArgument,
              std::string(to_string(id)) + " is not a closed-form branch");
}

}  // namespace disperse
