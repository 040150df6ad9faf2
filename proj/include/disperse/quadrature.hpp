#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "disperse/error.hpp"

namespace disperse {

struct QuadratureOptions {
  double abs_tol = 1e-13;   // target on the total absolute error estimate
  double fail_tol = 1e-9;   // error estimate that still counts as success at max depth
  int max_depth = 30;
};

template <typename Value>
struct QuadratureResult {
  Value value{};
  double error_estimate = 0.0;
  int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F, typename Value>
void gk15(F& f, double a, double b, Value& kronrod, double& err) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Value fc = f(center);
  Value k = fc * kronrod_weights[7];
  Value g = fc * gauss_weights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    const Value sum = f(center - dx) + f(center + dx);
    k += sum * kronrod_weights[j];
    if (j % 2 == 1) g += sum * gauss_weights[j / 2];
  }
  kronrod = k * half;
  err = std::abs((k - g) * half);
}

template <typename F, typename Value>
void adapt(F& f, double a, double b, double tol, int depth, const QuadratureOptions& opt,
           QuadratureResult<Value>& acc, bool& exhausted) {
  Value estimate{};
  double err = 0.0;
  gk15(f, a, b, estimate, err);
  acc.evaluations += 15;
  if (err <= tol || depth >= opt.max_depth) {
    if (err > tol) exhausted = true;
    acc.value += estimate;
    acc.error_estimate += err;
    return;
  }
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, 0.5 * tol, depth + 1, opt, acc, exhausted);
  adapt(f, mid, b, 0.5 * tol, depth + 1, opt, acc, exhausted);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration of f over consecutive panels
/// given by `breakpoints` (sorted). Value may be double or std::complex.
/// Throws QuadratureFailure if refinement reaches max_depth and the total
/// error estimate is still above fail_tol.
template <typename Value, typename F>
QuadratureResult<Value> integrate_panels(F&& f, const std::vector<double>& breakpoints,
                                         const QuadratureOptions& opt = {}) {
  QuadratureResult<Value> acc;
  if (breakpoints.size() < 2) return acc;
  const double span = breakpoints.back() - breakpoints.front();
  bool exhausted = false;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    detail::adapt(f, a, b, opt.abs_tol * (b - a) / span, 0, opt, acc, exhausted);
  }
  if (exhausted && acc.error_estimate > opt.fail_tol) {
    throw Error(ErrorKind::QuadratureFailure,
                "adaptive refinement reached depth " + std::to_string(opt.max_depth) +
                    " with error estimate " + std::to_string(acc.error_estimate));
  }
  return acc;
}

}  // namespace disperse
