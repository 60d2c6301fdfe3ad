#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "psihilfer/config.hpp"
#include "psihilfer/registry.hpp"
#include "psihilfer/report.hpp"

using namespace psihilfer;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string golden(const std::string& name) {
  return read_file(std::string(PSIHILFER_TEST_DIR) + "/golden/" + name);
}

const char* small_ivp_config() {
  return R"cfg(
[problem]
kind = ivp
mu = 1/2
nu = 1
T = 1

[constants]
y0 = 0
k = 2*pi

[functions]
u = "2 + t*y"
w = "t/3"
v = "sin(t) + q"

[solver]
N = 64
r = 1
tol = 1e-8

[hypothesis]
sigma = 1/10
delta = 7/97
g_norm = 2
y0_over_u0 = 0
)cfg";
}

const char* small_bvp_config() {
  return R"cfg(
[problem]
kind = bvp
mu = 0.4
nu = 0.5
T = 2

[psi]
kind = log_shift
c = 1

[constants]
a = 2
b = -1
y0 = 0.3

[functions]
u1 = "1 + t"
w1 = "t*x"
v1 = "cos(y)"
u2 = "2 - t/4"
w2 = "y/5"
v2 = "t + x"

[overrides]
u1_at_origin = 1
u2_at_origin = 2
)cfg";
}

}  // namespace

TEST_CASE("configuration text parses into a typed description") {
  const ProblemConfig cfg = parse_problem_config(small_ivp_config());
  REQUIRE(cfg.kind == ProblemKind::ivp);
  REQUIRE(cfg.mu == 0.5);  // "1/2" evaluates exactly
  REQUIRE(cfg.nu == 1.0);
  REQUIRE(cfg.T == 1.0);
  REQUIRE(cfg.psi.kind == "identity");  // defaulted: no [psi] section
  REQUIRE(cfg.y0 == 0.0);
  REQUIRE(cfg.k == Approx(6.283185307179586).margin(1e-15));
  REQUIRE(cfg.functions.size() == 3);
  REQUIRE(cfg.functions.at("u").source() == "2 + t*y");
  REQUIRE(cfg.solver.segments.value() == 64);
  REQUIRE(cfg.solver.grading.value() == 1.0);
  REQUIRE(cfg.solver.tol == 1e-8);
  REQUIRE(cfg.solver.max_iter == 200);       // defaulted
  REQUIRE(cfg.solver.relaxation == 0.5);     // defaulted
  REQUIRE(cfg.has_hypothesis);
  REQUIRE(cfg.hypothesis.at("delta") == Approx(7.0 / 97.0).margin(1e-16));

  const ProblemConfig bvp = parse_problem_config(small_bvp_config());
  REQUIRE(bvp.kind == ProblemKind::bvp);
  REQUIRE(bvp.a == 2.0);
  REQUIRE(bvp.b == -1.0);
  REQUIRE(bvp.psi.kind == "log_shift");
  REQUIRE(bvp.functions.size() == 6);
  REQUIRE(bvp.u1_at_origin.value() == 1.0);
  REQUIRE(bvp.u2_at_origin.value() == 2.0);
  REQUIRE_FALSE(bvp.has_hypothesis);
}

TEST_CASE("configuration errors name the offending location") {
  const auto parse = [](const std::string& text) {
    return parse_problem_config(text);
  };

  SECTION("lexical errors carry line numbers") {
    REQUIRE_THROWS_WITH(parse("[grid]\n"),
                        ContainsSubstring("unknown section [grid]"));
    REQUIRE_THROWS_WITH(parse("x = 1\n"),
                        ContainsSubstring("before any [section]"));
    REQUIRE_THROWS_WITH(parse("[problem]\nkind = ivp\nkind = bvp\n"),
                        ContainsSubstring("duplicate key 'problem.kind'"));
    REQUIRE_THROWS_WITH(parse("[problem]\n[problem]\n"),
                        ContainsSubstring("duplicate section"));
    REQUIRE_THROWS_WITH(parse("[functions]\nu = \"t\nv = \"1\"\n"),
                        ContainsSubstring("unterminated quoted string"));
    REQUIRE_THROWS_WITH(parse("[problem]\nkind\n"),
                        ContainsSubstring("expected 'key = value'"));
    REQUIRE_THROWS_WITH(parse("[problem]\nkind =\n"),
                        ContainsSubstring("empty value"));
  }

  SECTION("semantic errors carry section.key paths") {
    REQUIRE_THROWS_WITH(parse(""), ContainsSubstring("[problem] is required"));
    REQUIRE_THROWS_WITH(parse("[problem]\nkind = ivp\nnu = 1\nT = 1\n"),
                        ContainsSubstring("problem.mu"));
    REQUIRE_THROWS_WITH(
        parse("[problem]\nkind = pde\nmu = 0.5\nnu = 1\nT = 1\n"),
        ContainsSubstring("problem.kind"));
    REQUIRE_THROWS_WITH(
        parse("[problem]\nkind = ivp\nmu = 0.5\nnu = 1\nT = 0\n"),
        ContainsSubstring("problem.T"));

    // Substitution-function coherence surfaces when the live object is
    // built, still with section.key paths.
    std::string base = small_ivp_config();
    const auto psi_of = [&](const std::string& extra) {
      return build_psi(parse_problem_config(base + extra).psi);
    };
    REQUIRE_THROWS_WITH(psi_of("\n[psi]\nkind = banana\n"),
                        ContainsSubstring("psi.kind"));
    REQUIRE_THROWS_WITH(psi_of("\n[psi]\nkind = log_shift\n"),
                        ContainsSubstring("psi.c"));
    REQUIRE_THROWS_WITH(psi_of("\n[psi]\nkind = identity\nlambda = 1\n"),
                        ContainsSubstring("psi.lambda"));
  }

  SECTION("value-shape errors") {
    std::string text = small_ivp_config();
    text.replace(text.find("N = 64"), 6, "N = 3.5");
    REQUIRE_THROWS_WITH(parse_problem_config(text),
                        ContainsSubstring("expected an integer"));

    text = small_ivp_config();
    text.replace(text.find("mu = 1/2"), 8, "mu = abc");
    REQUIRE_THROWS_WITH(parse_problem_config(text),
                        ContainsSubstring("problem.mu"));

    text = small_ivp_config();
    text.replace(text.find("u = \"2 + t*y\""), 13, "u = 2 + t*y");
    REQUIRE_THROWS_WITH(parse_problem_config(text),
                        ContainsSubstring("double-quoted"));

    text = small_ivp_config();
    text.replace(text.find("u = \"2 + t*y\""), 13, "u = \"2 ** t\"");
    REQUIRE_THROWS_WITH(parse_problem_config(text),
                        ContainsSubstring("functions.u"));
  }

  SECTION("unknown keys are rejected, not ignored") {
    REQUIRE_THROWS_WITH(
        parse(std::string(small_ivp_config()) + "\n[overrides]\ntypo = 1\n"),
        ContainsSubstring("overrides.typo"));
    std::string text = small_ivp_config();
    text.replace(text.find("tol = 1e-8"), 10, "tolerance = 1e-8");
    REQUIRE_THROWS_WITH(parse_problem_config(text),
                        ContainsSubstring("solver.tolerance"));
  }

  SECTION("a hypothesis block must be complete for its kind") {
    std::string text = small_ivp_config();
    text.replace(text.find("delta = 7/97\n"), 13, "");
    REQUIRE_THROWS_WITH(parse_problem_config(text),
                        ContainsSubstring("hypothesis.delta"));
  }
}

TEST_CASE("problems build from configuration text") {
  SECTION("xi = 1 fills the origin multiplier from u(0, y0)") {
    const HybridIvpProblem problem =
        build_ivp_problem(parse_problem_config(small_ivp_config()));
    REQUIRE(problem.u_at_origin == 2.0);  // u = 2 + t*y at t = 0
    REQUIRE(problem.k == Approx(6.283185307179586).margin(1e-15));
  }

  SECTION("a zero origin multiplier is degenerate at t = 0") {
    std::string text = small_ivp_config();
    text.replace(text.find("u = \"2 + t*y\""), 13, "u = \"0\"");
    try {
      build_ivp_problem(parse_problem_config(text));
      FAIL("expected DegenerateMultiplier");
    } catch (const DegenerateMultiplier& e) {
      REQUIRE(e.t_node() == 0.0);
      REQUIRE_THAT(e.what(), ContainsSubstring("t = 0"));
    }
  }

  SECTION("xi < 1 requires an explicit origin override") {
    std::string text = small_ivp_config();
    text.replace(text.find("nu = 1"), 6, "nu = 0");
    REQUIRE_THROWS_WITH(build_ivp_problem(parse_problem_config(text)),
                        ContainsSubstring("overrides.u_at_origin"));
    text += "\n[overrides]\nu_at_origin = 1.5\n";
    const HybridIvpProblem problem =
        build_ivp_problem(parse_problem_config(text));
    REQUIRE(problem.u_at_origin == 1.5);
  }

  SECTION("kind mismatches are refused") {
    REQUIRE_THROWS_AS(
        build_bvp_problem(parse_problem_config(small_ivp_config())),
        ConfigError);
    REQUIRE_THROWS_AS(
        build_ivp_problem(parse_problem_config(small_bvp_config())),
        ConfigError);
  }

  SECTION("mesh and solver settings resolve defaults") {
    const ProblemConfig cfg = parse_problem_config(small_bvp_config());
    const MeshPtr mesh = build_mesh(cfg);
    const FracOrder order(cfg.mu, cfg.nu);
    REQUIRE(mesh->segments() == 512);  // defaulted
    REQUIRE(mesh->grading() == default_grading(order.xi()));
    REQUIRE(mesh->T() == 2.0);
    const SolverConfig solver = build_solver_config(cfg, mesh);
    REQUIRE(solver.tol == 1e-10);
    REQUIRE(solver.max_iter == 200);
    REQUIRE(solver.relaxation == 0.5);
  }

  SECTION("hypothesis builders produce checker-ready data") {
    const auto data =
        build_ivp_hypothesis(parse_problem_config(small_ivp_config()));
    const ExistenceReport report = check_ivp_condition(data);
    REQUIRE(report.lhs == Approx(0.97486828213001831).margin(1e-13));
    REQUIRE(report.satisfied);

    REQUIRE_THROWS_WITH(
        build_bvp_hypothesis(parse_problem_config(small_bvp_config())),
        ContainsSubstring("[hypothesis] is required"));
  }
}

TEST_CASE("registry entries expose canonical configurations") {
  REQUIRE(example_registry().size() == 2);
  REQUIRE(find_example("example1") != nullptr);
  REQUIRE(find_example("example2") != nullptr);
  REQUIRE(find_example("example3") == nullptr);

  const RegisteredExample& ex1 = *find_example("example1");
  const ProblemConfig cfg1 = ex1.parse();
  REQUIRE(cfg1.kind == ProblemKind::ivp);
  REQUIRE(cfg1.mu == 0.5);
  REQUIRE(cfg1.nu == 1.0);
  REQUIRE(cfg1.u_at_origin.value() == Approx(-97.0 / 35.0).margin(1e-15));
  REQUIRE(cfg1.solver.segments.value() == 512);
  REQUIRE(cfg1.solver.grading.value() == 1.0);
  REQUIRE(cfg1.solver.max_iter == 2000);
  REQUIRE(cfg1.hypothesis.at("sigma") == 0.1);

  const RegisteredExample& ex2 = *find_example("example2");
  const ProblemConfig cfg2 = ex2.parse();
  REQUIRE(cfg2.kind == ProblemKind::bvp);
  REQUIRE(cfg2.mu == Approx(1.0 / 3.0).margin(1e-16));
  REQUIRE(cfg2.a == 3.0);
  REQUIRE(cfg2.b == 1.0);
  REQUIRE(cfg2.hypothesis.at("omega1_abs") ==
          Approx(38016.0 / 2975.0).margin(1e-12));

  REQUIRE_THROWS_AS(ex1.bvp_problem(), InvalidArgument);
  REQUIRE_THROWS_AS(ex2.ivp_problem(), InvalidArgument);
}

TEST_CASE("native and expression evaluators agree on a sample grid") {
  const double ts[] = {0.0, 0.3, 0.7, 1.0};
  const double states[] = {-0.5, 0.2, 1.3};
  const double feds[] = {-0.4, 0.8};

  SECTION("first example") {
    const RegisteredExample& ex = *find_example("example1");
    const HybridIvpProblem native = ex.ivp_problem();
    const HybridIvpProblem parsed = build_ivp_problem(ex.parse());
    for (double t : ts) {
      for (double s : states) {
        REQUIRE(native.u(t, s) == Approx(parsed.u(t, s)).margin(1e-14));
        REQUIRE(native.w(t, s) == Approx(parsed.w(t, s)).margin(1e-14));
        for (double q : feds) {
          // Keep the fed-integral argument on the branch where the
          // expression is defined (denominator fed + 1 != 0).
          REQUIRE(native.v(t, s, q) ==
                  Approx(parsed.v(t, s, q)).margin(1e-14));
        }
      }
    }
    REQUIRE(native.u_at_origin == parsed.u_at_origin);
  }

  SECTION("second example") {
    const RegisteredExample& ex = *find_example("example2");
    const HybridBvpProblem native = ex.bvp_problem();
    const HybridBvpProblem parsed = build_bvp_problem(ex.parse());
    for (double t : ts) {
      for (double y : states) {
        for (double x : feds) {  // x*y stays far from 1 on these samples
          REQUIRE(native.u1(t, y, x) ==
                  Approx(parsed.u1(t, y, x)).margin(1e-14));
          REQUIRE(native.w1(t, y, x) ==
                  Approx(parsed.w1(t, y, x)).margin(1e-14));
          REQUIRE(native.v1(t, y, x) ==
                  Approx(parsed.v1(t, y, x)).margin(1e-14));
          REQUIRE(native.u2(t, y, x) ==
                  Approx(parsed.u2(t, y, x)).margin(1e-14));
          REQUIRE(native.w2(t, y, x) ==
                  Approx(parsed.w2(t, y, x)).margin(1e-14));
          REQUIRE(native.v2(t, y, x) ==
                  Approx(parsed.v2(t, y, x)).margin(1e-14));
        }
      }
    }
  }

  SECTION("the removable corner of the second example's v2") {
    const RegisteredExample& ex = *find_example("example2");
    const HybridBvpProblem native = ex.bvp_problem();
    const HybridBvpProblem parsed = build_bvp_problem(ex.parse());
    // Numerator and denominator vanish together only at t = 1, x*y = 1 —
    // the corner the exact solution passes through.  The native evaluator
    // returns the limit along that curve; the strict expression language
    // treats 0/0 as an evaluation error.
    REQUIRE(native.v2(1.0, 1.0, 1.0) == 0.0);
    REQUIRE_THROWS_AS(parsed.v2(1.0, 1.0, 1.0), EvalError);
    // A true pole (x*y = 1 with t != 1) is not masked: the native value is
    // non-finite and the solver's finiteness check reports it.
    REQUIRE_FALSE(std::isfinite(native.v2(0.5, 2.0, 0.5)));
  }
}

TEST_CASE("built-in problems solve to their benchmark curve") {
  // Coarse smoke runs; the full-resolution runs live in the acceptance
  // suite.  Both examples have the exact solution y = x = t.
  SECTION("first example from its default guess") {
    const HybridIvpProblem problem = find_example("example1")->ivp_problem();
    const MeshPtr mesh = make_mesh(problem.T, 64, 1.0);
    const SolutionPair sol = solve_coupled_ivp(
        problem, SolverConfig{.mesh = mesh, .max_iter = 2000});
    REQUIRE(sol.converged);
    double worst = 0.0;
    for (int j = 0; j <= 64; ++j) {
      worst = std::max(worst, std::fabs(sol.y.value(j) - mesh->node(j)));
      worst = std::max(worst, std::fabs(sol.x.value(j) - mesh->node(j)));
    }
    REQUIRE(worst <= 5e-3);
  }

  SECTION("second example from its default guess") {
    const HybridBvpProblem problem = find_example("example2")->bvp_problem();
    const MeshPtr mesh = make_mesh(problem.T, 64, 1.0);
    const SolutionPair sol = solve_coupled_bvp(
        problem, SolverConfig{.mesh = mesh, .max_iter = 2000});
    REQUIRE(sol.converged);
    double worst = 0.0;
    for (int j = 0; j <= 64; ++j) {
      worst = std::max(worst, std::fabs(sol.y.value(j) - mesh->node(j)));
      worst = std::max(worst, std::fabs(sol.x.value(j) - mesh->node(j)));
    }
    REQUIRE(worst <= 5e-3);
    const auto defects = boundary_defect(problem, sol.y, sol.x);
    REQUIRE(defects.first <= 1e-12);
    REQUIRE(defects.second <= 1e-12);
  }
}

TEST_CASE("example descriptions match the locked golden file") {
  std::ostringstream out;
  bool first = true;
  for (const auto& example : example_registry()) {
    if (!first) out << "\n";
    out << describe_example(example);
    first = false;
  }
  REQUIRE(out.str() == golden("list_examples.txt"));
}

TEST_CASE("emitted file formats match their locked golden files") {
  SECTION("solution CSV schema") {
    auto psi = make_psi(PsiFunction::identity());
    auto mesh = make_mesh(1.0, 4, 1.0);
    auto one = WeightedGridFunction::sample_weighted(
        mesh, psi, 1.0, [](double) { return 1.0; });
    std::ostringstream out;
    write_solution_csv(out, one, one);
    REQUIRE(out.str() == golden("solution_constant.csv"));
  }

  SECTION("run report key order") {
    RunReport r;
    r.source = "example2";
    r.kind = ProblemKind::bvp;
    r.mu = 0.25;
    r.nu = 1.0;
    r.xi = 1.0;
    r.T = 1.0;
    r.psi = "identity";
    r.y0 = 1.0;
    r.a = 3.0;
    r.b = 1.0;
    r.segments = 8;
    r.grading = 1.0;
    r.tol = 1e-10;
    r.max_iter = 2000;
    r.relaxation = 0.5;
    r.converged = true;
    r.iterations = 12;
    r.omega1 = -16.5;
    r.omega2 = -16.25;
    r.denominator1 = 0.25;
    r.denominator2 = 0.5;
    r.defect_y = 0.0;
    r.defect_x = 0.0;
    ExistenceReport ex;
    ex.lhs = 0.75;
    ex.margin = 0.25;
    ex.satisfied = true;
    ex.breakdown = {{"boundary_term", 0.5},
                    {"forcing_term", 0.125},
                    {"offset_term", 0.125}};
    r.existence = ex;
    r.solution_csv = "out/solution.csv";
    std::ostringstream out;
    write_report(out, r);
    REQUIRE(out.str() == golden("run_report.txt"));
  }

  SECTION("convergence CSV leaves the first order cell empty") {
    std::vector<ConvergenceRow> rows = {
        {.mu = 0.5, .segments = 256, .max_rel_err = 0.001},
        {.mu = 0.5,
         .segments = 512,
         .max_rel_err = 0.00025,
         .estimated_order = 2.0}};
    std::ostringstream out;
    write_convergence_csv(out, rows);
    REQUIRE(out.str() == golden("convergence_rows.csv"));
  }
}

TEST_CASE("solution CSV leaves plain values empty at the singular node") {
  auto psi = make_psi(PsiFunction::identity());
  auto mesh = make_mesh(1.0, 4, 1.0);
  auto z = WeightedGridFunction::sample_weighted(mesh, psi, 0.5,
                                                 [](double) { return 1.0; });
  std::ostringstream out;
  write_solution_csv(out, z, z);
  std::istringstream lines(out.str());
  std::string header, first_row, second_row;
  std::getline(lines, header);
  std::getline(lines, first_row);
  std::getline(lines, second_row);
  REQUIRE(header == "t,psi_t,weight,z_y,y,z_x,x");
  REQUIRE(first_row == "0,0,0,1,,1,");
  // At the first positive node the plain value is z / weight = tau^(xi-1).
  REQUIRE_THAT(second_row, ContainsSubstring("0.25,0.25,0.5,1,2,1,2"));

  auto other = WeightedGridFunction::sample_weighted(
      mesh, psi, 1.0, [](double) { return 1.0; });
  std::ostringstream sink;
  REQUIRE_THROWS_AS(write_solution_csv(sink, z, other), InvalidArgument);
}
