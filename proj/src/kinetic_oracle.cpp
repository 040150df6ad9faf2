#include "disperse/kinetic_oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "disperse/dispersion_core.hpp"
#include "disperse/error.hpp"

namespace disperse {

using constants::pi;
using cplx = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;

namespace {

double default_omega_guess(double k, const SpeciesParams& species, const DerivedScales& scales) {
  if (scales.degenerate) {
    const double omega = omega_degenerate_bohm_gross(k, scales);
    return k * scales.v_ch / omega >= 1.0 ? omega_zero_sound(k, scales) : omega;
  }
  return omega_weak_simple(k, species, scales);
}

// Smoothed Fermi step 1/2 (1 + tanh((1 - |u|) / w)), u in units of v_F.
ArrayXd smooth_step(const ArrayXd& u, double width) {
  return 0.5 * (1.0 + ((1.0 - u.abs()) / width).tanh());
}

}  // namespace

void OracleConfig::validate() const {
  if (n_v < 256 || n_v % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "oracle n_v must be even and >= 256");
  }
  if (!(v_max_factor >= 0.0)) throw Error(ErrorKind::InvalidArgument, "oracle v_max must be >= 0");
  if (!(dt_fraction > 0.0) || 2.0 * pi * dt_fraction >= 0.1) {
    throw Error(ErrorKind::InvalidArgument, "oracle dt must satisfy dt * omega_guess < 0.1");
  }
  if (!(t_end_periods >= 20.0)) {
    throw Error(ErrorKind::InvalidArgument, "oracle t_end must cover at least 20 periods");
  }
  if (!(edge_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "oracle edge width must be > 0");
  if (!std::isfinite(amplitude) || amplitude == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "oracle amplitude must be finite and nonzero");
  }
  if (!(omega_guess >= 0.0)) throw Error(ErrorKind::InvalidArgument, "oracle omega_guess < 0");
}

OracleRun evolve_mode(double k, const SpeciesParams& species, const DerivedScales& scales,
                      const OracleConfig& config) {
  config.validate();
  if (!(k != 0.0) || !std::isfinite(k)) {
    throw Error(ErrorKind::InvalidArgument, "oracle needs a finite nonzero k");
  }
  const double abs_k = std::abs(k);
  const bool degenerate = scales.degenerate;

  OracleRun run;
  run.k = k;
  run.omega_guess =
      config.omega_guess > 0.0 ? config.omega_guess : default_omega_guess(abs_k, species, scales);

  // Reduced units: velocity / v_unit, time * omega_unit, phi * v_unit / n0.
  const double v_thermal = degenerate ? 0.0 : std::sqrt(scales.v_th_sq);
  const double v_unit =
      degenerate ? scales.v_ch
                 : std::sqrt(2.0 * constants::boltzmann * species.temperature / species.mass);
  const double omega_unit = scales.omega_p > 0.0 ? scales.omega_p : abs_k * scales.v_ch;

  if (degenerate) {
    run.v_max = (config.v_max_factor > 0.0 ? config.v_max_factor : 1.5) * scales.v_ch;
  } else {
    const double factor = config.v_max_factor > 0.0 ? config.v_max_factor : 8.0;
    run.v_max = std::max(factor * std::max(scales.v_ch, v_thermal),
                         1.2 * run.omega_guess / abs_k);  // keep the resonance on the grid
  }
  const double period = 2.0 * pi / run.omega_guess;
  run.dt = config.dt_fraction * period;
  const int n_steps = static_cast<int>(std::ceil(config.t_end_periods / config.dt_fraction));
  const double t_end = n_steps * run.dt;
  if (abs_k * run.v_max * t_end > config.n_v * pi) {
    throw Error(ErrorKind::GridResonanceUnderresolved,
                "k v_max t_end = " + std::to_string(abs_k * run.v_max * t_end) +
                    " exceeds n_v pi; raise n_v or shorten t_end");
  }

  const int n = config.n_v;
  const double u_max = run.v_max / v_unit;
  const ArrayXd u = ArrayXd::LinSpaced(n, -u_max, u_max);
  const double du = 2.0 * u_max / (n - 1);
  ArrayXd weights = ArrayXd::Constant(n, du);
  weights(0) = weights(n - 1) = 0.5 * du;

  // f0 and df0/du, scaled by v_unit / n0 and v_unit^2 / n0.
  ArrayXd f0(n);
  ArrayXd f0_prime(n);
  if (degenerate) {
    const ArrayXd step = smooth_step(u, config.edge_width);
    f0 = 0.75 * (1.0 - u.square()) * step;
    f0_prime = -1.5 * u * step;
  } else {
    const double f_scale = v_unit / species.density;
    for (int j = 0; j < n; ++j) {
      f0(j) = reduced_fz(u(j) * v_unit, species, scales.fugacity) * f_scale;
      f0_prime(j) = reduced_fz_derivative(u(j) * v_unit, species, scales.fugacity) * f_scale *
                    v_unit;
    }
  }

  ArrayXcd g(n);
  if (config.init_shape == InitShape::MaxwellianShaped) {
    g = f0.cast<cplx>();
  } else {
    g = ArrayXcd::Constant(n, cplx{1.0, 0.0});
  }
  const double mass = (weights * g.real()).sum();
  g *= config.amplitude / mass;

  const double kappa = k * v_unit / omega_unit;
  const double c1 = coefficient_C1(abs_k, scales) / (omega_unit * omega_unit);
  const cplx coupling = -c1 / cplx{0.0, kappa};
  const ArrayXcd force = coupling * f0_prime.cast<cplx>();
  auto rhs = [&](const ArrayXcd& state) -> ArrayXcd {
    return (weights.cast<cplx>() * state).sum() * force;
  };

  const double h = run.dt * omega_unit;
  const ArrayXcd half_phase = (cplx{0.0, -0.5 * h * kappa} * u.cast<cplx>()).exp();
  const ArrayXcd full_phase = half_phase.square();

  run.times.resize(n_steps + 1);
  run.density.resize(n_steps + 1);
  const auto moment = [&](const ArrayXcd& state) {
    return (weights.cast<cplx>() * state).sum() * species.density;
  };
  run.times(0) = 0.0;
  run.density(0) = moment(g);
  const double n_start = std::abs(run.density(0));
  for (int step = 1; step <= n_steps; ++step) {
    // Lawson RK4: streaming exactly through exp(-i kappa u h), the rank-one
    // field coupling by classical RK4 in the rotating frame.
    const ArrayXcd k1 = rhs(g);
    const ArrayXcd k2 = rhs(half_phase * (g + 0.5 * h * k1));
    const ArrayXcd k3 = rhs(half_phase * g + 0.5 * h * k2);
    const ArrayXcd k4 = rhs(full_phase * g + h * half_phase * k3);
    g = full_phase * g + (h / 6.0) * (full_phase * k1 + 2.0 * half_phase * (k2 + k3) + k4);
    run.times(step) = step * run.dt;
    run.density(step) = moment(g);
    if (!(std::abs(run.density(step)) <= 1e6 * n_start) && n_start > 0.0) {
      throw Error(ErrorKind::NumericalBlowup,
                  "|N| grew by more than 1e6 at step " + std::to_string(step));
    }
  }
  run.velocity = (u * v_unit).matrix();
  run.amplitude = (g * (species.density / v_unit)).matrix();
  return run;
}

OracleFit fit_omega_eta(const OracleRun& run) {
  const Eigen::Index total = run.density.size();
  const Eigen::Index start = total / 5;
  const Eigen::Index m = total - start;
  const double dt = run.dt;
  if (m < 16 || !(run.omega_guess > 0.0) ||
      m * dt < 10.0 * 2.0 * pi / run.omega_guess) {
    throw Error(ErrorKind::InvalidArgument, "fit needs at least 10 periods after the transient");
  }
  const Eigen::VectorXcd y = run.density.tail(m);
  const double scale = y.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw Error(ErrorKind::FitAmbiguous, "N(t) vanishes identically");

  // Spectrum of the Hann-windowed record, zero padded 16x.
  Eigen::Index n_fft = 1;
  while (n_fft < 16 * m) n_fft *= 2;
  std::vector<cplx> padded(static_cast<std::size_t>(n_fft), cplx{0.0, 0.0});
  for (Eigen::Index i = 0; i < m; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * pi * i / (m - 1));
    padded[static_cast<std::size_t>(i)] = w * y(i) / scale;
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> spectrum;
  fft.fwd(spectrum, padded);
  std::vector<double> power(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) power[i] = std::norm(spectrum[i]);

  const auto signed_bin = [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    return ii < n_fft / 2 ? static_cast<double>(ii) : static_cast<double>(ii - n_fft);
  };
  const auto wrap = [&](Eigen::Index i) {
    return static_cast<std::size_t>(((i % n_fft) + n_fft) % n_fft);
  };
  std::size_t peak = 1;
  for (std::size_t i = 1; i < power.size(); ++i) {
    if (power[i] > power[peak]) peak = i;
  }
  // a real record has mirror peaks; report the positive-frequency one
  if (signed_bin(peak) < 0) {
    const std::size_t mirror = wrap(-static_cast<Eigen::Index>(signed_bin(peak)));
    if (power[mirror] >= 0.999 * power[peak]) peak = mirror;
  }
  const double peak_bin = signed_bin(peak);

  // Second local maximum within 3 dB, outside the main lobes of the peak
  // and of its mirror (Hann main lobe: +-2 unpadded bins).
  const double lobe = 2.5 * static_cast<double>(n_fft) / static_cast<double>(m);
  for (std::size_t i = 1; i < power.size(); ++i) {
    const double b = signed_bin(i);
    if (std::abs(b - peak_bin) < lobe || std::abs(b + peak_bin) < lobe) continue;
    const double left = power[wrap(static_cast<Eigen::Index>(i) - 1)];
    const double right = power[wrap(static_cast<Eigen::Index>(i) + 1)];
    if (power[i] >= left && power[i] >= right && power[i] >= 0.5 * power[peak]) {
      throw Error(ErrorKind::FitAmbiguous,
                  "second spectral peak within 3 dB at omega = " +
                      std::to_string(2.0 * pi * b / (n_fft * dt)));
    }
  }
  // quadratic interpolation of the log power around the peak
  const double lm = std::log(power[wrap(static_cast<Eigen::Index>(peak) - 1)]);
  const double l0 = std::log(power[peak]);
  const double lp = std::log(power[wrap(static_cast<Eigen::Index>(peak) + 1)]);
  const double denom = lm - 2.0 * l0 + lp;
  const double offset = denom != 0.0 ? 0.5 * (lm - lp) / denom : 0.0;
  OracleFit fit;
  fit.omega = 2.0 * pi * (peak_bin + offset) / (n_fft * dt);

  // Envelope: demodulate, average over one period (fractional end by linear
  // interpolation of the cumulative trapezoid), regress log magnitude.
  Eigen::VectorXcd demod(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    demod(i) = y(i) / scale * std::exp(cplx{0.0, -fit.omega * i * dt});
  }
  Eigen::VectorXcd cumulative(m);
  cumulative(0) = 0.0;
  for (Eigen::Index i = 1; i < m; ++i) {
    cumulative(i) = cumulative(i - 1) + 0.5 * (demod(i) + demod(i - 1));
  }
  const double window = 2.0 * pi / (std::abs(fit.omega) * dt);  // samples per period
  const auto whole = static_cast<Eigen::Index>(std::floor(window));
  const double frac = window - static_cast<double>(whole);
  const Eigen::Index n_avg = m - whole - 1;
  if (n_avg < 8) throw Error(ErrorKind::InvalidArgument, "record too short for the envelope");
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(static_cast<std::size_t>(n_avg));
  ys.reserve(static_cast<std::size_t>(n_avg));
  for (Eigen::Index i = 0; i < n_avg; ++i) {
    const cplx upper = cumulative(i + whole) +
                       frac * (cumulative(i + whole + 1) - cumulative(i + whole));
    const double magnitude = std::abs((upper - cumulative(i)) / window);
    if (!(magnitude > 0.0)) continue;
    xs.push_back(i * dt);
    ys.push_back(std::log(magnitude));
  }
  const auto count = static_cast<double>(xs.size());
  if (count < 8) throw Error(ErrorKind::FitAmbiguous, "envelope vanishes");
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  fit.eta = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - mean_y - fit.eta * (xs[i] - mean_x);
    sse += e * e;
  }
  fit.eta_stderr = std::sqrt(sse / std::max(count - 2.0, 1.0) / sxx);

  // Normalized RMS of the best model a exp(s t) + b exp(conj(s) t).
  const cplx s{fit.eta, fit.omega};
  Eigen::MatrixXcd basis(m, 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = i * dt;
    basis(i, 0) = std::exp(s * t);
    basis(i, 1) = std::exp(std::conj(s) * t);
  }
  const Eigen::VectorXcd target = y / scale;
  const Eigen::VectorXcd coeffs = basis.colPivHouseholderQr().solve(target);
  fit.fit_residual = (basis * coeffs - target).norm() / target.norm();
  return fit;
}

void write_density_csv(const OracleRun& run, std::ostream& out) {
  out << "t,re_N,im_N,abs_N\n";
  char line[128];
  for (Eigen::Index i = 0; i < run.density.size(); ++i) {
    const cplx v = run.density(i);
    std::snprintf(line, sizeof line, "%.16e,%.16e,%.16e,%.16e\n", run.times(i), v.real(),
                  v.imag(), std::abs(v));
    out << line;
  }
}

}  // namespace disperse
