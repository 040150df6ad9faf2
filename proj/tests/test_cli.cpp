#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "disperse/cli.hpp"
#include "disperse/error.hpp"
#include "disperse/run_config.hpp"

using namespace disperse;
namespace fs = std::filesystem;

namespace {

const std::string kDegenerate = R"(
[species]
mass = 9.1093837015e-31
charge = -1.602176634e-19
degeneracy = 2
density = 1e28
temperature = 0
statistics = fermi

[sweep]
k_min = 0.05
k_max = 0.8
n_points = 12
units = reduced

[branches]
list = ExactDegenerate, DegenerateBohmGross, ZeroSound
)";

const std::string kBosons = R"(
[species]
mass = 1.8218767403e-30
charge = -3.204353268e-19
degeneracy = 1
density = 1e26
temperature = 1662.9301
statistics = bose

[sweep]
k_min = 0.18
k_max = 0.22
n_points = 2
units = reduced

[branches]
list = ExactWeak, WeakSimple

[oracle]
enabled = true
n_v = 2048
)";

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("disperse_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_with(const std::string& text, const std::string& name, bool compare = false,
                 const std::string& extra = "") {
  const fs::path dir = scratch_dir(name);
  const fs::path cfg = write_file(dir / "config.ini", text + extra);
  CliOptions opt;
  opt.config_path = cfg.string();
  opt.output_dir = (dir / "out").string();
  std::ostringstream out;
  std::ostringstream err;
  const int code = compare ? compare_command(opt, out, err) : run_command(opt, out, err);
  return {code, out.str(), err.str()};
}

fs::path out_dir(const std::string& name) { return fs::temp_directory_path() /
                                                   ("disperse_cli_test_" + name) / "out"; }

int system_exit(const std::string& command) {
  const int status = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run: writes one CSV per branch with the fixed schema") {
  const auto r = run_with(kDegenerate, "schema");
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  const std::regex number(R"(-?\d\.\d{16}e[+-]\d{2,3})");
  for (const char* branch : {"ExactDegenerate", "DegenerateBohmGross", "ZeroSound"}) {
    const auto rows = lines_of(slurp(out_dir("schema") / (std::string(branch) + ".csv")));
    REQUIRE(rows.size() == 13);
    CHECK(rows[0] == "k,omega,eta,v_phase,r,epsilon,residual,iterations,converged,branch");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto cells = split(rows[i]);
      REQUIRE(cells.size() == 10);
      for (int c = 0; c < 7; ++c) CHECK_MESSAGE(std::regex_match(cells[c], number), cells[c]);
      CHECK(cells[8] == "true");
      CHECK(cells[9] == branch);
    }
  }
  CHECK(fs::exists(out_dir("schema") / "summary.ini"));
}

TEST_CASE("run: reduced units put omega near 1 at small k") {
  const auto r = run_with(kDegenerate, "reduced");
  REQUIRE(r.code == 0);
  const auto rows = lines_of(slurp(out_dir("reduced") / "ExactDegenerate.csv"));
  const auto first = split(rows[1]);
  CHECK(std::stod(first[0]) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(std::stod(first[1]) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(std::stod(first[2]) == 0.0);
}

TEST_CASE("run: output is deterministic") {
  REQUIRE(run_with(kDegenerate, "det_a").code == 0);
  REQUIRE(run_with(kDegenerate, "det_b").code == 0);
  for (const char* f : {"ExactDegenerate.csv", "DegenerateBohmGross.csv", "ZeroSound.csv",
                        "summary.ini"}) {
    const auto a = slurp(out_dir("det_a") / f);
    const auto b = slurp(out_dir("det_b") / f);
    // summary.ini records the output path, which differs between the runs
    if (std::string(f) == "summary.ini") {
      CHECK(lines_of(a).size() == lines_of(b).size());
    } else {
      CHECK(a == b);
    }
  }
}

TEST_CASE("run: the summary reproduces the run") {
  REQUIRE(run_with(kDegenerate, "trip_a").code == 0);
  const std::string summary = slurp(out_dir("trip_a") / "summary.ini");
  CHECK(summary.find("[result.scales]") != std::string::npos);
  CHECK(summary.find("[result.ExactDegenerate]") != std::string::npos);
  CHECK(summary.find("converged = 12") != std::string::npos);
  // the resolved config fills in defaults
  CHECK(summary.find("abs_tol") != std::string::npos);
  CHECK(summary.find("spacing") != std::string::npos);
  REQUIRE(run_with(summary, "trip_b").code == 0);
  for (const char* f : {"ExactDegenerate.csv", "DegenerateBohmGross.csv", "ZeroSound.csv"}) {
    CHECK(slurp(out_dir("trip_a") / f) == slurp(out_dir("trip_b") / f));
  }
  std::istringstream in(summary);
  const RunConfig parsed = parse_config(in);
  CHECK(parsed.sweep.n_points == 12);
  CHECK(parsed.branches.size() == 3);
}

TEST_CASE("run: unconverged points exit 2 and are flagged") {
  std::string text = kDegenerate;
  text += "\n[solver]\nabs_tol = 1e-300\nmax_iter = 1\n";
  const auto r = run_with(text, "unconverged");
  CHECK(r.code == 2);
  const auto rows = lines_of(slurp(out_dir("unconverged") / "ExactDegenerate.csv"));
  REQUIRE(rows.size() == 13);
  // one Newton step cannot reach the tolerance, so every point exhausts its
  // seeds and is reported at the seed values
  int failed = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    CHECK(cells[8] == "false");
    CHECK(cells[6] == "nan");
    failed += cells[8] == "false";
  }
  // closed-form branches are unaffected
  for (const auto& row : lines_of(slurp(out_dir("unconverged") / "ZeroSound.csv"))) {
    if (row.rfind("k,", 0) != 0) CHECK(split(row)[8] == "true");
  }
  const std::string summary = slurp(out_dir("unconverged") / "summary.ini");
  CHECK(summary.find("failed = " + std::to_string(failed)) != std::string::npos);
}

TEST_CASE("run: config errors exit 1 with a reason") {
  struct Case {
    std::string extra;
    std::string message;
  };
  const std::vector<Case> cases = {
      {"\n[output]\nwidth = 3\n", "unknown key"},
      {"\n[plot]\ncolor = red\n", "unknown section"},
      {"\n[output]\npath = a\npath = b\n", "duplicate"},
  };
  for (const auto& c : cases) {
    const auto r = run_with(kDegenerate, "bad_key", false, c.extra);
    CHECK(r.code == 1);
    CHECK_MESSAGE(r.err.find(c.message) != std::string::npos, r.err);
  }
  auto replace = [](std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
  };
  const std::vector<std::pair<std::string, std::string>> edits = {
      {replace(kDegenerate, "units = reduced", "units = reduced\nspacing = cubic"),
       "unknown spacing 'cubic'"},
      {replace(kDegenerate, "k_max = 0.8", "k_max = 0.01"), "k_min"},
      {replace(kDegenerate, "ZeroSound", "WeakSimple"), "WeakSimple"},
      {replace(kDegenerate, "density = 1e28", "density = -1"), "density"},
      {replace(kDegenerate, "n_points = 12", "n_points = twelve"), "n_points"},
      {replace(kBosons, "temperature = 1662.9301", "temperature = 100"), "DegeneracyOutOfRange"},
  };
  for (const auto& [text, message] : edits) {
    const auto r = run_with(text, "bad_value");
    CHECK(r.code == 1);
    CHECK_MESSAGE(r.err.find(message) != std::string::npos, r.err);
    CHECK(r.err.rfind("error: ", 0) == 0);
  }
}

TEST_CASE("run: missing config file") {
  CliOptions opt;
  opt.config_path = (fs::temp_directory_path() / "disperse_no_such_config.ini").string();
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run_command(opt, out, err) == 1);
  CHECK(err.str().find("cannot open") != std::string::npos);
}

TEST_CASE("run: quiet suppresses progress lines") {
  const fs::path dir = scratch_dir("quiet");
  CliOptions opt;
  opt.config_path = write_file(dir / "c.ini", kDegenerate).string();
  opt.output_dir = (dir / "out").string();
  opt.quiet = true;
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run_command(opt, out, err) == 0);
  CHECK(out.str().empty());
}

TEST_CASE("compare: needs the oracle and an exact branch") {
  auto r = run_with(kDegenerate, "cmp_off", true);
  CHECK(r.code == 1);
  CHECK(r.err.find("compare requires oracle") != std::string::npos);
  std::string closed_only = kBosons;
  closed_only.replace(closed_only.find("ExactWeak, "), 11, "");
  r = run_with(closed_only, "cmp_closed", true);
  CHECK(r.code == 1);
  CHECK(r.err.find("compare requires at least one exact branch") != std::string::npos);
}

TEST_CASE("compare: bosons are damped in both solver and oracle") {
  const auto r = run_with(kBosons, "cmp_bosons", true);
  CHECK(r.code == 0);
  const auto rows = lines_of(slurp(out_dir("cmp_bosons") / "compare_ExactWeak.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] ==
        "k,omega_solver,eta_solver,omega_oracle,eta_oracle,rel_err_omega,abs_err_eta,sign_agree");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    REQUIRE(cells.size() == 8);
    CHECK(std::stod(cells[2]) < 0.0);
    CHECK(std::stod(cells[4]) < 0.0);
    CHECK(std::stod(cells[5]) < 0.02);
    CHECK(cells[7] == "true");
  }
  CHECK(fs::exists(out_dir("cmp_bosons") / "compare_summary.ini"));
}

TEST_CASE("thread count from the environment") {
  ::setenv("DISPERSE_THREADS", "3", 1);
  CHECK(thread_count() == 3);
  ::setenv("DISPERSE_THREADS", "0", 1);
  CHECK(thread_count() == std::max(1u, std::thread::hardware_concurrency()));
  ::unsetenv("DISPERSE_THREADS");
  CHECK(thread_count() >= 1);
}

TEST_CASE("executable: exit codes") {
  const std::string tool = DISPERSE_TOOL_PATH;
  CHECK(system_exit(tool + " --help") == 0);
  CHECK(system_exit(tool + " run --help") == 0);
  CHECK(system_exit(tool) == 1);
  CHECK(system_exit(tool + " run") == 1);
  CHECK(system_exit(tool + " frobnicate") == 1);
  const fs::path dir = scratch_dir("exe");
  const fs::path cfg = write_file(dir / "c.ini", kDegenerate);
  CHECK(system_exit(tool + " run --quiet --config " + cfg.string() + " --output-dir " +
                    (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "ExactDegenerate.csv"));
  CHECK(system_exit(tool + " compare --config " + cfg.string() + " --output-dir " +
                    (dir / "out").string()) == 1);
}

TEST_CASE("shipped configs parse and validate") {
  for (const auto& entry : fs::directory_iterator(fs::path(DISPERSE_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(validate(load_config(entry.path().string())));
  }
}
