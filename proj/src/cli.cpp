#include "disperse/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>
#include <vector>

#include "disperse/error.hpp"
#include "disperse/kinetic_oracle.hpp"
#include "disperse/root_solver.hpp"
#include "disperse/run_config.hpp"

namespace disperse {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

class Formatter {
 public:
  explicit Formatter(int significant) {
    std::snprintf(spec_, sizeof spec_, "%%.%de", significant - 1);
  }
  std::string operator()(double v) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec_, v);
    return buf;
  }

 private:
  char spec_[16]{};
};

struct Setup {
  RunConfig config;
  DerivedScales scales;
  std::vector<double> ks;
  fs::path out_dir;
};

// Loads, validates and derives everything; prints the reason and returns
// nullopt on failure (exit code 1).
std::optional<Setup> prepare(const CliOptions& options, std::ostream& err) {
  try {
    Setup s;
    s.config = load_config(options.config_path);
    if (options.output_dir) s.config.output.path = *options.output_dir;
    s.scales = derive_scales(s.config.species, scale_options(s.config));
    for (BranchId id : s.config.branches) check_branch_compatible(id, s.scales);
    s.ks = k_grid(s.config, s.scales);
    s.out_dir = s.config.output.path;
    fs::create_directories(s.out_dir);
    return s;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
  }
  return std::nullopt;
}

DispersionResult unconverged_at(double k, BranchId branch, const Setup& s) {
  DispersionResult r;
  r.k = k;
  r.branch = branch;
  try {
    r.rate = physics_seed(branch, k, s.config.species, s.scales);
  } catch (const Error&) {
    r.rate = {0.0, omega_quantum_langmuir(k, s.scales)};
  }
  r.residual_norm = kNaN;
  r.converged = false;
  return r;
}

std::vector<DispersionResult> solve_branch(BranchId branch, const Setup& s) {
  const auto& sp = s.config.species;
  if (s.config.mode == SolveMode::Dominant && is_exact(branch)) {
    std::vector<DispersionResult> out;
    for (double k : s.ks) {
      const auto best = solve_dominant(k, branch, sp, s.scales, s.config.solver);
      out.push_back(best ? *best : unconverged_at(k, branch, s));
    }
    return out;
  }
  try {
    return sweep(s.ks, branch, sp, s.scales, s.config.solver);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SeedFailure) throw;
  }
  // The first point failed; keep going point by point so the rest of the
  // branch is still reported.
  std::vector<DispersionResult> out;
  for (std::size_t i = 0; i < s.ks.size(); ++i) {
    try {
      const std::vector<double> rest(s.ks.begin() + static_cast<std::ptrdiff_t>(i), s.ks.end());
      auto tail = sweep(rest, branch, sp, s.scales, s.config.solver);
      out.insert(out.end(), tail.begin(), tail.end());
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SeedFailure) throw;
      out.push_back(unconverged_at(s.ks[i], branch, s));
    }
  }
  return out;
}

void write_branch_csv(const fs::path& path, const std::vector<DispersionResult>& rows,
                      const Setup& s) {
  const Formatter fmt(s.config.output.precision);
  const double ku = k_unit(s.config, s.scales);
  const double ru = rate_unit(s.config, s.scales);
  const double vu = s.config.sweep.units == Units::SI ? 1.0 : s.scales.v_ch;
  std::ofstream out(path);
  out << "k,omega,eta,v_phase,r,epsilon,residual,iterations,converged,branch\n";
  for (const auto& row : rows) {
    out << fmt(row.k / ku) << ',' << fmt(row.rate.omega / ru) << ',' << fmt(row.rate.eta / ru)
        << ',' << fmt(row.rate.v_phi(row.k) / vu) << ',' << fmt(row.rate.r(row.k, s.scales.v_ch))
        << ',' << fmt(row.rate.epsilon()) << ',' << fmt(row.residual_norm) << ','
        << row.iterations << ',' << (row.converged ? "true" : "false") << ','
        << to_string(row.branch) << '\n';
  }
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
}

void write_scales(std::ostream& out, const DerivedScales& d) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "\n[result.scales]\nomega_p = %.17g\nv_ch = %.17g\nfugacity = %.17g\n"
                "v_th_sq = %.17g\nlambda_quantum = %.17g\ndegenerate = %s\n",
                d.omega_p, d.v_ch, d.fugacity, d.v_th_sq, d.lambda_quantum,
                d.degenerate ? "true" : "false");
  out << buf;
}

}  // namespace

unsigned thread_count() {
  const char* env = std::getenv("DISPERSE_THREADS");
  long requested = 0;
  if (env && *env) {
    char* end = nullptr;
    requested = std::strtol(env, &end, 10);
    if (*end != '\0' || requested < 0) requested = 0;
  }
  if (requested > 0) return static_cast<unsigned>(requested);
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_command(const CliOptions& options, std::ostream& out, std::ostream& err) {
  auto setup = prepare(options, err);
  if (!setup) return 1;
  const Setup& s = *setup;
  const auto& branches = s.config.branches;

  std::vector<std::vector<DispersionResult>> results(branches.size());
  std::vector<std::string> failures(branches.size());
  parallel_for(branches.size(), [&](std::size_t i) {
    try {
      results[i] = solve_branch(branches[i], s);
    } catch (const Error& e) {
      failures[i] = e.what();
      results[i].clear();
      for (double k : s.ks) results[i].push_back(unconverged_at(k, branches[i], s));
    }
  });

  bool all_converged = true;
  std::ofstream summary(s.out_dir / "summary.ini");
  write_config(s.config, summary);
  write_scales(summary, s.scales);
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string name(to_string(branches[i]));
    const fs::path csv = s.out_dir / (name + ".csv");
    try {
      write_branch_csv(csv, results[i], s);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
    std::size_t converged = 0;
    double worst = 0.0;
    for (const auto& r : results[i]) {
      if (r.converged) {
        ++converged;
        worst = std::max(worst, r.residual_norm);
      }
    }
    const std::size_t failed = results[i].size() - converged;
    if (failed) all_converged = false;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "\n[result.%s]\nfile = %s.csv\npoints = %zu\nconverged = %zu\nfailed = %zu\n"
                  "max_residual = %.17g\n",
                  name.c_str(), name.c_str(), results[i].size(), converged, failed, worst);
    summary << buf;
    if (!failures[i].empty()) summary << "error = " << failures[i] << "\n";
    if (!options.quiet) {
      out << name << ": " << converged << "/" << results[i].size() << " converged -> "
          << csv.string() << "\n";
    }
    if (!failures[i].empty()) err << name << ": " << failures[i] << "\n";
  }
  if (!summary) {
    err << "error: cannot write summary\n";
    return 1;
  }
  return all_converged ? 0 : 2;
}

int compare_command(const CliOptions& options, std::ostream& out, std::ostream& err) {
  auto setup = prepare(options, err);
  if (!setup) return 1;
  const Setup& s = *setup;
  if (!s.config.oracle.enabled) {
    err << "error: compare requires oracle (set oracle.enabled = true)\n";
    return 1;
  }
  std::vector<BranchId> exact;
  for (BranchId id : s.config.branches) {
    if (is_exact(id)) exact.push_back(id);
  }
  if (exact.empty()) {
    err << "error: compare requires at least one exact branch in branches.list\n";
    return 1;
  }

  const Formatter fmt(s.config.output.precision);
  const double ku = k_unit(s.config, s.scales);
  const double ru = rate_unit(s.config, s.scales);
  bool all_ok = true;
  std::ofstream summary(s.out_dir / "compare_summary.ini");
  write_config(s.config, summary);
  write_scales(summary, s.scales);

  for (BranchId branch : exact) {
    const std::string name(to_string(branch));
    std::vector<DispersionResult> solved;
    try {
      solved = solve_branch(branch, s);
    } catch (const Error& e) {
      err << name << ": " << e.what() << "\n";
      all_ok = false;
      continue;
    }
    std::vector<std::size_t> picks;
    const auto stride = static_cast<std::size_t>(s.config.oracle.subsample);
    for (std::size_t i = 0; i < solved.size(); i += stride) {
      picks.push_back(i);
    }
    std::vector<OracleFit> fits(picks.size());
    std::vector<std::string> problems(picks.size());
    parallel_for(picks.size(), [&](std::size_t j) {
      const auto& root = solved[picks[j]];
      OracleConfig oc = s.config.oracle.config;
      if (root.converged) oc.omega_guess = root.rate.omega;
      try {
        const OracleRun run = evolve_mode(root.k, s.config.species, s.scales, oc);
        fits[j] = fit_omega_eta(run);
        if (s.config.oracle.dump_density) {
          std::ofstream dump(s.out_dir / (name + "_density_" + std::to_string(picks[j]) + ".csv"));
          write_density_csv(run, dump);
        }
      } catch (const Error& e) {
        problems[j] = e.what();
        fits[j] = {kNaN, kNaN, kNaN, kNaN};
      }
    });

    std::ofstream csv(s.out_dir / ("compare_" + name + ".csv"));
    csv << "k,omega_solver,eta_solver,omega_oracle,eta_oracle,rel_err_omega,abs_err_eta,"
           "sign_agree\n";
    std::size_t agreeing = 0;
    for (std::size_t j = 0; j < picks.size(); ++j) {
      const auto& root = solved[picks[j]];
      const auto& fit = fits[j];
      const double rel = std::abs(fit.omega - root.rate.omega) / root.rate.omega;
      const double abs_eta = std::abs(fit.eta - root.rate.eta);
      // Damping below these floors is reported as unresolved (sign 0): the
      // solver's by its tolerance, the oracle's by three standard errors.
      const auto solver_sign = [&] {
        if (std::abs(root.rate.eta) <= 1e-9 * root.rate.omega) return 0;
        return root.rate.eta < 0.0 ? -1 : 1;
      }();
      const auto oracle_sign = [&] {
        if (!(std::abs(fit.eta) > std::max(3.0 * fit.eta_stderr, 1e-9 * std::abs(fit.omega)))) {
          return 0;
        }
        return fit.eta < 0.0 ? -1 : 1;
      }();
      const bool sign_ok = problems[j].empty() && root.converged && solver_sign == oracle_sign;
      const bool ok = sign_ok && rel < 0.02;
      if (ok) ++agreeing;
      all_ok = all_ok && ok;
      csv << fmt(root.k / ku) << ',' << fmt(root.rate.omega / ru) << ','
          << fmt(root.rate.eta / ru) << ',' << fmt(fit.omega / ru) << ',' << fmt(fit.eta / ru)
          << ',' << fmt(rel) << ',' << fmt(abs_eta / ru) << ',' << (sign_ok ? "true" : "false")
          << '\n';
      if (!problems[j].empty()) err << name << " k[" << picks[j] << "]: " << problems[j] << "\n";
    }
    summary << "\n[result." << name << "]\nfile = compare_" << name << ".csv\npoints = "
            << picks.size() << "\nagreeing = " << agreeing << "\n";
    if (!options.quiet) {
      out << name << ": " << agreeing << "/" << picks.size() << " oracle points agree -> "
          << (s.out_dir / ("compare_" + name + ".csv")).string() << "\n";
    }
  }
  return all_ok ? 0 : 2;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Quantum plasma dispersion sweeps with a kinetic cross-check", "disperse"};
  app.require_subcommand(1);
  CliOptions options;
  std::string output_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output-dir", output_dir, "directory for CSV and summary output");
    sub->add_flag("--quiet", options.quiet, "suppress progress output");
  };
  CLI::App* run = app.add_subcommand("run", "solve the configured branches over the k grid");
  CLI::App* compare = app.add_subcommand("compare", "cross-check exact branches with the oracle");
  add_common(run);
  add_common(compare);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (!output_dir.empty()) options.output_dir = output_dir;
  if (run->parsed()) return run_command(options, std::cout, std::cerr);
  return compare_command(options, std::cout, std::cerr);
}

}  // namespace disperse
