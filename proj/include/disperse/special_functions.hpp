#pragma once

#include <complex>

namespace disperse {

enum class Statistics { Fermi, Bose };

/// How a generalized zeta value was obtained; surfaced for diagnostics.
enum class ZetaMethod {
  Empty,             // alpha == 0
  DirectSeries,      // plain partial sum with an explicit tail bound
  AlternatingAccel,  // Cohen-Rodriguez Villegas-Zagier acceleration (fermions near alpha = 1)
  LogExpansion,      // expansion of Li_r(e^mu) about mu = 0 (bosons near alpha = 1)
  Riemann,           // alpha == 1 for bosons: the Riemann zeta function
};

struct ZetaEvaluation {
  double value = 0.0;
  int terms = 0;  // series terms actually summed (truncation index)
  ZetaMethod method = ZetaMethod::Empty;
};

/// Generalized zeta series sum_j (-+1)^(j-1) alpha^j / j^order. The upper
/// sign (alternating) is used for fermions, the lower (all positive) for
/// bosons. Requires order >= 1 and 0 <= alpha <= 1; bosons at alpha = 1 need
/// order > 1 (the series diverges otherwise, raised as NonConvergent).
ZetaEvaluation zeta_pm_eval(double order, double alpha, Statistics stats);

inline double zeta_pm(double order, double alpha, Statistics stats) {
  return zeta_pm_eval(order, alpha, stats).value;
}

/// exp(z^2) erfc(z) for complex z. Entire; overflows to inf once
/// Re(z^2) exceeds the double range in the left half plane.
std::complex<double> erfcx(std::complex<double> z);

/// G(z) = sqrt(pi) z exp(z^2) erfc(z), the kernel of the weakly degenerate
/// dispersion series. G(z) -> 1 - 1/(2 z^2) + 3/(4 z^4) for large |z| in the
/// right half plane.
inline std::complex<double> scaled_erfc(std::complex<double> z) {
  constexpr double sqrt_pi = 1.7724538509055160273;
  if (z == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
  return sqrt_pi * z * erfcx(z);
}

}  // namespace disperse
