#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end tests of the command-line binary: subcommand behaviour, the
// exit-code contract, and the stability of machine-readable output.

using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "psihilfer_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

/// Runs the CLI through the shell, capturing exit code, stdout and stderr.
RunResult run_cli(const std::string& args) {
  const fs::path out_file = work_dir() / "stdout.txt";
  const fs::path err_file = work_dir() / "stderr.txt";
  const std::string command = std::string(PSIHILFER_CLI_PATH) + " " + args +
                              " > " + out_file.string() + " 2> " +
                              err_file.string();
  const int status = std::system(command.c_str());
  RunResult result;
  REQUIRE(WIFEXITED(status));
  result.exit_code = WEXITSTATUS(status);
  result.out = read_file(out_file);
  result.err = read_file(err_file);
  return result;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path path = work_dir() / name;
  std::ofstream out(path);
  out << text;
  return path;
}

std::string golden(const std::string& name) {
  return read_file(fs::path(PSIHILFER_TEST_DIR) / "golden" / name);
}

const char* plain_ivp_body() {
  return R"cfg(
[problem]
kind = ivp
mu = 1/2
nu = 1
T = 1

[constants]
y0 = 0

[functions]
u = "2 + t*y"
w = "t/3"
v = "sin(t) + q"

[solver]
N = 32
)cfg";
}

}  // namespace

TEST_CASE("list-examples output is byte-stable") {
  const RunResult r = run_cli("list-examples");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out == golden("list_examples.txt"));
}

TEST_CASE("check reports the built-in existence conditions") {
  SECTION("first example satisfies its bound") {
    const RunResult r = run_cli("check example1");
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("existence_lhs: 0.97486828213"));
    REQUIRE_THAT(r.out, ContainsSubstring("existence_satisfied: yes"));
    REQUIRE_THAT(r.out, ContainsSubstring("existence_term_forcing_term:"));
  }
  SECTION("second example satisfies its bound") {
    const RunResult r = run_cli("check example2");
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("existence_lhs: 0.73489206750"));
    REQUIRE_THAT(r.out, ContainsSubstring("existence_satisfied: yes"));
  }
}

TEST_CASE("check exits 3 when the bound is not established") {
  // The first example's hypothesis with the forcing bound raised until the
  // condition fails: the outcome is inconclusive, not an error.
  const std::string text = std::string(plain_ivp_body()) +
                           "\n[hypothesis]\n"
                           "sigma = 1/10\n"
                           "delta = 7/97\n"
                           "g_norm = 2.3\n"
                           "y0_over_u0 = 0\n";
  const fs::path cfg = write_config("inconclusive.cfg", text);
  const RunResult r = run_cli("check " + cfg.string());
  REQUIRE(r.exit_code == 3);
  REQUIRE_THAT(r.out, ContainsSubstring("existence_satisfied: no"));
  REQUIRE_THAT(r.out, ContainsSubstring("existence_lhs: 1.110273782181479"));
}

TEST_CASE("check exits 1 without a hypothesis block") {
  const fs::path cfg = write_config("no_hyp.cfg", plain_ivp_body());
  const RunResult r = run_cli("check " + cfg.string());
  REQUIRE(r.exit_code == 1);
  REQUIRE_THAT(r.err, ContainsSubstring("[hypothesis] is required"));
}

TEST_CASE("solve writes solution and report files") {
  const fs::path out_dir = work_dir() / "solve_ok";
  const RunResult r =
      run_cli("solve example1 --N 64 --out " + out_dir.string());
  REQUIRE(r.exit_code == 0);
  REQUIRE_THAT(r.out, ContainsSubstring("converged: yes"));
  REQUIRE_THAT(r.out, ContainsSubstring("existence_satisfied: yes"));

  const std::string report = read_file(out_dir / "report.txt");
  REQUIRE(report == r.out);  // the stdout report mirrors the file
  const std::string csv = read_file(out_dir / "solution.csv");
  REQUIRE_THAT(csv, ContainsSubstring("t,psi_t,weight,z_y,y,z_x,x\n"));
  // Exact solution is y = x = t; the last node is t = 1.  Columns 4-7 of the
  // final row must all be within solver tolerance of 1.
  std::istringstream rows(csv);
  std::string line, last;
  while (std::getline(rows, line)) {
    if (!line.empty()) last = line;
  }
  std::istringstream fields(last);
  std::string cell;
  int column = 0;
  while (std::getline(fields, cell, ',')) {
    ++column;
    if (column >= 4) {
      REQUIRE(std::fabs(std::strtod(cell.c_str(), nullptr) - 1.0) <= 5e-3);
    }
  }
  REQUIRE(column == 7);
}

TEST_CASE("solve exits 2 on non-convergence but still reports") {
  const fs::path out_dir = work_dir() / "solve_stall";
  const RunResult r = run_cli("solve example1 --N 32 --max-iter 2 --out " +
                              out_dir.string());
  REQUIRE(r.exit_code == 2);
  REQUIRE_THAT(r.out, ContainsSubstring("converged: no"));
  REQUIRE_THAT(r.out, ContainsSubstring("iterations: 2"));
  REQUIRE(fs::exists(out_dir / "solution.csv"));
  REQUIRE(fs::exists(out_dir / "report.txt"));
}

TEST_CASE("solve exits 1 on a degenerate multiplier, naming the node") {
  std::string text = plain_ivp_body();
  const auto at = text.find("u = \"2 + t*y\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 13, "u = \"0\"");
  const fs::path cfg = write_config("degenerate.cfg", text);
  const RunResult r = run_cli("solve " + cfg.string() + " --out " +
                              (work_dir() / "degen_out").string());
  REQUIRE(r.exit_code == 1);
  REQUIRE_THAT(r.err, ContainsSubstring("t = 0"));
  REQUIRE_THAT(r.err, ContainsSubstring("multiplier"));
}

TEST_CASE("solve exits 1 on unreadable config paths") {
  const RunResult missing = run_cli("solve no_such_file.cfg");
  REQUIRE(missing.exit_code == 1);
  REQUIRE_THAT(missing.err, ContainsSubstring("config file"));

  const RunResult dir = run_cli("solve " + work_dir().string());
  REQUIRE(dir.exit_code == 1);
  REQUIRE_THAT(dir.err, ContainsSubstring("config file"));
}

TEST_CASE("identities exits 0 on pass and 4 on failure") {
  const RunResult pass = run_cli("identities --N 128");
  REQUIRE(pass.exit_code == 0);
  REQUIRE_THAT(pass.out, ContainsSubstring("failed: 0"));
  REQUIRE_THAT(pass.out, ContainsSubstring("semigroup"));
  REQUIRE_THAT(pass.out, ContainsSubstring("right-inversion"));

  const RunResult fail = run_cli("identities --N 8");
  REQUIRE(fail.exit_code == 4);
  REQUIRE_THAT(fail.out, ContainsSubstring("FAIL"));
}

TEST_CASE("convergence emits the study CSV") {
  const RunResult r = run_cli("convergence --mu 0.5 --N 32,64");
  REQUIRE(r.exit_code == 0);
  std::istringstream rows(r.out);
  std::string header, first, second;
  std::getline(rows, header);
  std::getline(rows, first);
  std::getline(rows, second);
  REQUIRE(header == "mu,N,max_rel_err,estimated_order");
  REQUIRE_THAT(first, ContainsSubstring("0.5,32,"));
  REQUIRE(first.back() == ',');  // no coarser run to compare against
  REQUIRE_THAT(second, ContainsSubstring("0.5,64,"));
  REQUIRE(second.back() != ',');

  const RunResult bad = run_cli("convergence --N 64,32");
  REQUIRE(bad.exit_code == 1);
  REQUIRE_THAT(bad.err, ContainsSubstring("strictly increasing"));
}

TEST_CASE("shipped sample configs solve and check cleanly") {
  const fs::path configs = fs::path(PSIHILFER_TEST_DIR).parent_path() /
                           "configs";
  for (const char* name : {"ivp_example.cfg", "bvp_example.cfg"}) {
    const std::string cfg = (configs / name).string();
    CAPTURE(name);
    const RunResult checked = run_cli("check " + cfg);
    REQUIRE(checked.exit_code == 0);
    REQUIRE_THAT(checked.out, ContainsSubstring("existence_satisfied: yes"));
    const fs::path out_dir = work_dir() / (std::string("sample_") + name);
    const RunResult solved =
        run_cli("solve " + cfg + " --out " + out_dir.string());
    REQUIRE(solved.exit_code == 0);
    REQUIRE_THAT(solved.out, ContainsSubstring("converged: yes"));
  }
}

TEST_CASE("PSI_HILFER_LOG=quiet silences progress chatter") {
  const fs::path out_file = work_dir() / "quiet_out.txt";
  const fs::path err_file = work_dir() / "quiet_err.txt";
  const std::string command = std::string("PSI_HILFER_LOG=quiet ") +
                              PSIHILFER_CLI_PATH + " check example1 > " +
                              out_file.string() + " 2> " + err_file.string();
  const int status = std::system(command.c_str());
  REQUIRE(WIFEXITED(status));
  REQUIRE(WEXITSTATUS(status) == 0);
  REQUIRE(read_file(err_file).empty());
  REQUIRE_THAT(read_file(out_file),
               ContainsSubstring("existence_satisfied: yes"));
}
