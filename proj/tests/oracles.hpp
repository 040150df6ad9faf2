#pragma once

// Independent reference values used by the unit and acceptance tests. None
// of these call into the library's special-function code.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <complex>

#include "disperse/quantum_stats.hpp"

namespace oracle {

using real50 = boost::multiprecision::cpp_bin_float_50;

// exp(z^2) erfc(z) = (2/sqrt(pi)) int_0^inf exp(-t^2 - 2 z t) dt, summed with
// 61-point Gauss-Kronrod panels in 50-digit arithmetic. Panels are short
// enough to resolve the oscillation exp(-2 i y t); the upper limit is where
// the integrand envelope has dropped below 1e-45 of its peak. Only used for
// Re z >= 0, where the integrand has no large cancelling lobes.
inline std::complex<real50> erfcx_integral(const real50& x, const real50& y) {
  using boost::math::quadrature::gauss_kronrod;
  const double xd = static_cast<double>(x);
  const double yd = static_cast<double>(abs(y));
  double t_stop = 11.0;
  if (xd > 0.0) t_stop = std::min(t_stop, 110.0 / (2.0 * xd));
  const double panel = std::min(0.25, yd > 0.0 ? 1.5 / yd : 0.25);
  auto re = [&](const real50& t) { return exp(-t * t - 2 * x * t) * cos(2 * y * t); };
  auto im = [&](const real50& t) { return -exp(-t * t - 2 * x * t) * sin(2 * y * t); };
  real50 sum_re = 0;
  real50 sum_im = 0;
  for (double a = 0.0; a < t_stop; a += panel) {
    const real50 lo = a;
    const real50 hi = std::min(a + panel, t_stop);
    sum_re += gauss_kronrod<real50, 61>::integrate(re, lo, hi, 0);
    sum_im += gauss_kronrod<real50, 61>::integrate(im, lo, hi, 0);
  }
  const real50 scale = 2 / sqrt(boost::math::constants::pi<real50>());
  return {sum_re * scale, sum_im * scale};
}

// Left half plane through erfc(z) = 2 - erfc(-z), with exp(z^2) in 50 digits.
inline std::complex<double> erfcx_quadrature(std::complex<double> z) {
  const real50 x = z.real();
  const real50 y = z.imag();
  if (z.real() >= 0.0) {
    const auto v = erfcx_integral(x, y);
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
  }
  const auto mirror = erfcx_integral(-x, -y);
  const real50 mag = 2 * exp(x * x - y * y);
  const real50 re = mag * cos(2 * x * y) - mirror.real();
  const real50 im = mag * sin(2 * x * y) - mirror.imag();
  return {static_cast<double>(re), static_cast<double>(im)};
}

// Riemann zeta for s > 1: partial sum to N plus the Euler-Maclaurin tail
// N^(1-s)/(s-1) - N^-s/2 + s N^(-s-1)/12 - s(s+1)(s+2) N^(-s-3)/720
// + s(s+1)(s+2)(s+3)(s+4) N^(-s-5)/30240.
inline double riemann_zeta_em(double s_in, int n = 2000) {
  const real50 s = s_in;
  real50 sum = 0;
  for (int j = 1; j < n; ++j) sum += pow(real50(j), -s);
  const real50 big_n = n;
  sum += pow(big_n, 1 - s) / (s - 1) + pow(big_n, -s) / 2 + s * pow(big_n, -s - 1) / 12 -
         s * (s + 1) * (s + 2) * pow(big_n, -s - 3) / 720 +
         s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * pow(big_n, -s - 5) / 30240;
  return static_cast<double>(sum);
}

// ln 2 = sum_j 1 / (j 2^j), a different series from the alternating one.
inline double ln2_series() {
  real50 sum = 0;
  real50 pow2 = 1;
  for (int j = 1; j < 200; ++j) {
    pow2 *= 2;
    sum += 1 / (j * pow2);
  }
  return static_cast<double>(sum);
}

// Direct 50-digit partial sum of sum_j (-+1)^(j-1) alpha^j / j^r until the
// terms fall below 1e-30 (alpha < 1).
inline double zeta_direct(double r, double alpha, bool fermi) {
  const real50 a = alpha;
  real50 sum = 0;
  real50 power = 1;
  for (int j = 1; j < 200000; ++j) {
    power *= a;
    const real50 term = power / pow(real50(j), real50(r));
    sum += (fermi && j % 2 == 0) ? -term : term;
    if (term < real50(1e-30)) break;
  }
  return static_cast<double>(sum);
}

// Temperature that puts a species at fugacity alpha, through the density
// normalization with the 50-digit series above.
inline double temperature_for_fugacity(const disperse::SpeciesParams& s, double alpha) {
  using namespace disperse::constants;
  const double target = zeta_direct(1.5, alpha, s.statistics == disperse::Statistics::Fermi);
  const double h3 = planck * planck * planck;
  return std::pow((s.density / s.degeneracy) * h3 / target, 2.0 / 3.0) /
         (2.0 * pi * s.mass * boltzmann);
}

inline disperse::SpeciesParams electrons_at_fugacity(double alpha, disperse::Statistics stats,
                                                     double density = 1e26) {
  disperse::SpeciesParams s;
  s.statistics = stats;
  s.density = density;
  s.degeneracy = stats == disperse::Statistics::Fermi ? 2 : 1;
  s.temperature = temperature_for_fugacity(s, alpha);
  return s;
}

}  // namespace oracle
