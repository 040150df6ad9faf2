#include "disperse/run_config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "disperse/error.hpp"

namespace disperse {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"species",
       {"mass", "charge", "degeneracy", "density", "temperature", "statistics",
        "fully_degenerate"}},
      {"sweep", {"k_min", "k_max", "n_points", "spacing", "units"}},
      {"branches", {"list"}},
      {"solver", {"abs_tol", "max_iter", "fd_step", "continuation", "mode"}},
      {"oracle",
       {"enabled", "v_max", "n_v", "dt", "t_end", "init_shape", "subsample", "edge_width",
        "dump_density"}},
      {"hooks", {"bohm_term"}},
      {"output", {"path", "precision"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ConfigError, field + ": " + what);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto value = sec->get_optional<std::string>(key);
    if (!value) return std::nullopt;
    return trim(*value);
  }

  void number(const std::string& section, const std::string& key, double& out) const {
    if (const auto v = raw(section, key)) {
      std::size_t used = 0;
      try {
        out = std::stod(*v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != v->size() || !std::isfinite(out)) {
        fail(section + "." + key, "expected a number, got '" + *v + "'");
      }
    }
  }

  void integer(const std::string& section, const std::string& key, int& out) const {
    double value = out;
    number(section, key, value);
    if (value != std::floor(value) || std::abs(value) > 1e9) {
      fail(section + "." + key, "expected an integer");
    }
    out = static_cast<int>(value);
  }

  void boolean(const std::string& section, const std::string& key, bool& out) const {
    if (const auto v = raw(section, key)) {
      const std::string s = lower(*v);
      if (s == "true" || s == "on" || s == "yes" || s == "1") {
        out = true;
      } else if (s == "false" || s == "off" || s == "no" || s == "0") {
        out = false;
      } else {
        fail(section + "." + key, "expected on/off, got '" + *v + "'");
      }
    }
  }

  template <typename Enum>
  void choice(const std::string& section, const std::string& key,
              const std::map<std::string, Enum>& options, const std::string& label,
              Enum& out) const {
    if (const auto v = raw(section, key)) {
      const auto it = options.find(lower(*v));
      if (it == options.end()) fail(section + "." + key, "unknown " + label + " '" + *v + "'");
      out = it->second;
    }
  }

 private:
  const pt::ptree& tree_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::ConfigError,
                "config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) fail(section, "key outside any section");
    if (section.rfind("result.", 0) == 0) continue;  // summary statistics
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) fail(section, "unknown section");
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) fail(section + "." + key, "unknown key");
    }
  }

  const Reader r(tree);
  RunConfig c;
  if (!tree.get_child_optional("species")) fail("species", "section is required");
  r.number("species", "mass", c.species.mass);
  r.number("species", "charge", c.species.charge);
  r.integer("species", "degeneracy", c.species.degeneracy);
  r.number("species", "density", c.species.density);
  r.number("species", "temperature", c.species.temperature);
  r.choice("species", "statistics",
           std::map<std::string, Statistics>{{"fermi", Statistics::Fermi},
                                             {"bose", Statistics::Bose}},
           "statistics", c.species.statistics);
  r.boolean("species", "fully_degenerate", c.species.fully_degenerate);

  if (!tree.get_child_optional("sweep")) fail("sweep", "section is required");
  r.number("sweep", "k_min", c.sweep.k_min);
  r.number("sweep", "k_max", c.sweep.k_max);
  r.integer("sweep", "n_points", c.sweep.n_points);
  r.choice("sweep", "spacing",
           std::map<std::string, Spacing>{{"linear", Spacing::Linear}, {"log", Spacing::Log}},
           "spacing", c.sweep.spacing);
  r.choice("sweep", "units",
           std::map<std::string, Units>{{"si", Units::SI}, {"reduced", Units::Reduced}}, "units",
           c.sweep.units);

  if (const auto list = r.raw("branches", "list")) {
    std::stringstream ss(*list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto id = branch_from_string(item);
      if (!id) fail("branches.list", "unknown branch '" + item + "'");
      if (std::find(c.branches.begin(), c.branches.end(), *id) == c.branches.end()) {
        c.branches.push_back(*id);
      }
    }
  }

  r.number("solver", "abs_tol", c.solver.abs_tol);
  r.integer("solver", "max_iter", c.solver.max_iter);
  r.number("solver", "fd_step", c.solver.fd_step);
  r.boolean("solver", "continuation", c.solver.continuation);
  r.choice("solver", "mode",
           std::map<std::string, SolveMode>{{"continuation", SolveMode::Continuation},
                                            {"dominant", SolveMode::Dominant}},
           "mode", c.mode);

  r.boolean("oracle", "enabled", c.oracle.enabled);
  r.number("oracle", "v_max", c.oracle.config.v_max_factor);
  r.integer("oracle", "n_v", c.oracle.config.n_v);
  r.number("oracle", "dt", c.oracle.config.dt_fraction);
  r.number("oracle", "t_end", c.oracle.config.t_end_periods);
  r.choice("oracle", "init_shape",
           std::map<std::string, InitShape>{
               {"maxwellian_shaped", InitShape::MaxwellianShaped},
               {"uniform_density_kick", InitShape::UniformDensityKick}},
           "init_shape", c.oracle.config.init_shape);
  r.integer("oracle", "subsample", c.oracle.subsample);
  r.number("oracle", "edge_width", c.oracle.config.edge_width);
  r.boolean("oracle", "dump_density", c.oracle.dump_density);

  r.boolean("hooks", "bohm_term", c.bohm_term);

  if (const auto path = r.raw("output", "path")) c.output.path = *path;
  r.integer("output", "precision", c.output.precision);

  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config '" + path + "'");
  return parse_config(in);
}

void validate(const RunConfig& c) {
  if (!(c.sweep.k_min > 0.0)) fail("sweep.k_min", "must be positive");
  if (!(c.sweep.k_min < c.sweep.k_max)) fail("sweep.k_max", "must exceed k_min");
  if (c.sweep.n_points < 2) fail("sweep.n_points", "must be at least 2");
  if (c.branches.empty()) fail("branches.list", "at least one branch is required");
  if (!(c.solver.abs_tol > 0.0)) fail("solver.abs_tol", "must be positive");
  if (c.solver.max_iter < 1) fail("solver.max_iter", "must be at least 1");
  if (!(c.solver.fd_step > 0.0 && c.solver.fd_step < 1e-3)) {
    fail("solver.fd_step", "must lie in (0, 1e-3)");
  }
  if (c.oracle.subsample < 1) fail("oracle.subsample", "must be at least 1");
  if (c.output.precision < 1 || c.output.precision > 17) {
    fail("output.precision", "must lie in [1, 17]");
  }
  if (c.oracle.enabled) {
    try {
      c.oracle.config.validate();
    } catch (const Error& e) {
      fail("oracle", e.what());
    }
  }
}

void write_config(const RunConfig& c, std::ostream& out) {
  const auto& s = c.species;
  out << "[species]\n"
      << "mass = " << format_double(s.mass) << "\n"
      << "charge = " << format_double(s.charge) << "\n"
      << "degeneracy = " << s.degeneracy << "\n"
      << "density = " << format_double(s.density) << "\n"
      << "temperature = " << format_double(s.temperature) << "\n"
      << "statistics = " << (s.statistics == Statistics::Fermi ? "fermi" : "bose") << "\n"
      << "fully_degenerate = " << (s.fully_degenerate ? "true" : "false") << "\n\n";
  out << "[sweep]\n"
      << "k_min = " << format_double(c.sweep.k_min) << "\n"
      << "k_max = " << format_double(c.sweep.k_max) << "\n"
      << "n_points = " << c.sweep.n_points << "\n"
      << "spacing = " << (c.sweep.spacing == Spacing::Linear ? "linear" : "log") << "\n"
      << "units = " << (c.sweep.units == Units::SI ? "si" : "reduced") << "\n\n";
  out << "[branches]\nlist = ";
  for (std::size_t i = 0; i < c.branches.size(); ++i) {
    out << (i ? ", " : "") << to_string(c.branches[i]);
  }
  out << "\n\n";
  out << "[solver]\n"
      << "abs_tol = " << format_double(c.solver.abs_tol) << "\n"
      << "max_iter = " << c.solver.max_iter << "\n"
      << "fd_step = " << format_double(c.solver.fd_step) << "\n"
      << "continuation = " << (c.solver.continuation ? "true" : "false") << "\n"
      << "mode = " << (c.mode == SolveMode::Continuation ? "continuation" : "dominant")
      << "\n\n";
  const auto& o = c.oracle.config;
  out << "[oracle]\n"
      << "enabled = " << (c.oracle.enabled ? "true" : "false") << "\n"
      << "v_max = " << format_double(o.v_max_factor) << "\n"
      << "n_v = " << o.n_v << "\n"
      << "dt = " << format_double(o.dt_fraction) << "\n"
      << "t_end = " << format_double(o.t_end_periods) << "\n"
      << "init_shape = "
      << (o.init_shape == InitShape::MaxwellianShaped ? "maxwellian_shaped"
                                                      : "uniform_density_kick")
      << "\n"
      << "subsample = " << c.oracle.subsample << "\n"
      << "edge_width = " << format_double(o.edge_width) << "\n"
      << "dump_density = " << (c.oracle.dump_density ? "true" : "false") << "\n\n";
  out << "[hooks]\nbohm_term = " << (c.bohm_term ? "on" : "off") << "\n\n";
  out << "[output]\npath = " << c.output.path << "\nprecision = " << c.output.precision << "\n";
}

ScaleOptions scale_options(const RunConfig& c) { return {c.bohm_term ? 1.0 : 0.0}; }

double k_unit(const RunConfig& c, const DerivedScales& scales) {
  if (c.sweep.units == Units::SI) return 1.0;
  if (scales.omega_p > 0.0) return scales.omega_p / scales.v_ch;
  return 2.0 * c.species.mass * scales.v_ch / constants::hbar;
}

double rate_unit(const RunConfig& c, const DerivedScales& scales) {
  if (c.sweep.units == Units::SI) return 1.0;
  if (scales.omega_p > 0.0) return scales.omega_p;
  return k_unit(c, scales) * scales.v_ch;
}

std::vector<double> k_grid(const RunConfig& c, const DerivedScales& scales) {
  const double unit = k_unit(c, scales);
  const int n = c.sweep.n_points;
  std::vector<double> ks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    double k = 0.0;
    if (c.sweep.spacing == Spacing::Linear) {
      k = c.sweep.k_min + t * (c.sweep.k_max - c.sweep.k_min);
    } else {
      k = c.sweep.k_min * std::pow(c.sweep.k_max / c.sweep.k_min, t);
    }
    ks[static_cast<std::size_t>(i)] = k * unit;
  }
  ks.back() = c.sweep.k_max * unit;
  return ks;
}

}  // namespace disperse
