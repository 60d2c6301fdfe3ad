/// \file acceptance_main.cpp
/// Release gate: nine numbered end-to-end criteria, each printing exactly
/// one line
///
///   criterion N: PASS|FAIL - <what was measured vs what is required> [time]
///
/// Usage: acceptance [criterion-number].  With no argument all nine run in
/// order.  The process exits 0 iff every criterion it ran passed, so each
/// criterion can also be registered as its own ctest entry.
///
/// Thresholds are pinned here, in code, on purpose: this binary is the
/// contract, not a configurable tool.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "psihilfer/config.hpp"
#include "psihilfer/existence.hpp"
#include "psihilfer/frac_integral.hpp"
#include "psihilfer/hybrid_bvp.hpp"
#include "psihilfer/hybrid_ivp.hpp"
#include "psihilfer/identities.hpp"
#include "psihilfer/registry.hpp"

namespace {

using namespace psihilfer;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buffer[512];
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return std::string(buffer);
}

// ---------------------------------------------------------------------------

/// 1. The first built-in example's existence bound evaluates to the
///    benchmark value 0.9748 (+- 5e-4).
Outcome criterion_1() {
  const ProblemConfig cfg = find_example("example1")->parse();
  const ExistenceReport report = check_ivp_condition(build_ivp_hypothesis(cfg));
  const bool pass =
      std::fabs(report.lhs - 0.9748) <= 5e-4 && report.satisfied;
  return {pass, fmt("existence lhs = %.6f, satisfied = %s (required 0.9748 "
                    "+- 0.0005, satisfied)",
                    report.lhs, report.satisfied ? "yes" : "no")};
}

/// 2. The second built-in example's existence bound evaluates to the
///    benchmark value 0.7348 (+- 5e-4).
Outcome criterion_2() {
  const ProblemConfig cfg = find_example("example2")->parse();
  const ExistenceReport report = check_bvp_condition(build_bvp_hypothesis(cfg));
  const bool pass =
      std::fabs(report.lhs - 0.7348) <= 5e-4 && report.satisfied;
  return {pass, fmt("existence lhs = %.6f, satisfied = %s (required 0.7348 "
                    "+- 0.0005, satisfied)",
                    report.lhs, report.satisfied ? "yes" : "no")};
}

/// 3. Boundary constants of the second example evaluated at the exact
///    solution pair (t, t): the benchmark values are Omega1 = 38016/2975
///    and Omega2 = -539/123, to absolute error 1e-8.
Outcome criterion_3() {
  const HybridBvpProblem problem = find_example("example2")->bvp_problem();
  const MeshPtr mesh = make_mesh(problem.T, 512, 1.0);
  const auto diagonal = WeightedGridFunction::sample_plain(
      mesh, problem.psi, [](double t) { return t; });
  const OmegaPair omega = compute_omega(problem, diagonal, diagonal);
  const double expected1 = 38016.0 / 2975.0;
  const double expected2 = -539.0 / 123.0;
  const double err1 = std::fabs(omega.omega1 - expected1);
  const double err2 = std::fabs(omega.omega2 - expected2);
  const bool pass = err1 <= 1e-8 && err2 <= 1e-8;
  return {pass,
          fmt("omega1 = %.9f (required %.9f), omega2 = %.9f (required %.9f), "
              "tolerance 1e-8",
              omega.omega1, expected1, omega.omega2, expected2)};
}

/// 4. The first example solves from the zero initial guess at N = 512 and
///    lands on the exact solution (t, t) within 5e-3; the exact pair itself
///    is a near-fixed-point of the discrete map (residual <= 1e-2).
Outcome criterion_4() {
  const HybridIvpProblem problem = find_example("example1")->ivp_problem();
  const MeshPtr mesh = make_mesh(problem.T, 512, 1.0);
  const auto zero = WeightedGridFunction::sample_plain(
      mesh, problem.psi, [](double) { return 0.0; });
  SolverConfig config{.mesh = mesh, .tol = 1e-10, .max_iter = 2000,
                      .relaxation = 0.5};
  config.initial_guess = {{zero, zero}};
  const SolutionPair sol = solve_coupled_ivp(problem, config);

  double err = 0.0;
  for (std::size_t j = 0; j < sol.y.size(); ++j) {
    const double t = mesh->node(j);
    err = std::max(err, std::fabs(sol.y.value(j) - t));
    err = std::max(err, std::fabs(sol.x.value(j) - t));
  }
  const auto diagonal = WeightedGridFunction::sample_plain(
      mesh, problem.psi, [](double t) { return t; });
  const auto residual = residual_ivp(problem, diagonal, diagonal);
  const double res = std::max(residual.first, residual.second);
  const bool pass = sol.converged && err <= 5e-3 && res <= 1e-2;
  return {pass, fmt("converged = %s, max node error = %.3e (required <= "
                    "5e-3), exact-pair residual = %.3e (required <= 1e-2)",
                    sol.converged ? "yes" : "no", err, res)};
}

/// 5. The second example solves from the perturbed guess (t, t) + 0.01 at
///    N = 512 within 5e-3 of (t, t), with boundary defects <= 1e-6.
Outcome criterion_5() {
  const HybridBvpProblem problem = find_example("example2")->bvp_problem();
  const MeshPtr mesh = make_mesh(problem.T, 512, 1.0);
  const auto guess = WeightedGridFunction::sample_plain(
      mesh, problem.psi, [](double t) { return t + 0.01; });
  SolverConfig config{.mesh = mesh, .tol = 1e-10, .max_iter = 2000,
                      .relaxation = 0.5};
  config.initial_guess = {{guess, guess}};
  const SolutionPair sol = solve_coupled_bvp(problem, config);

  double err = 0.0;
  for (std::size_t j = 0; j < sol.y.size(); ++j) {
    const double t = mesh->node(j);
    err = std::max(err, std::fabs(sol.y.value(j) - t));
    err = std::max(err, std::fabs(sol.x.value(j) - t));
  }
  const auto defects = boundary_defect(problem, sol.y, sol.x);
  const double defect = std::max(defects.first, defects.second);
  const bool pass = sol.converged && err <= 5e-3 && defect <= 1e-6;
  return {pass, fmt("converged = %s, max node error = %.3e (required <= "
                    "5e-3), boundary defect = %.3e (required <= 1e-6)",
                    sol.converged ? "yes" : "no", err, defect)};
}

/// 6. The product-integration quadrature against the closed-form power
///    rule: relative error <= 1e-3 at N = 1024 and empirical order >= 1.5
///    from N = 256 to N = 1024 for every (mu, delta, Psi) combination.
///    Combinations whose integrand lies in the rule's exactness class sit
///    at roundoff, where an order estimate is 0/0 noise; those instead
///    satisfy the stricter absolute gate err(1024) <= 1e-12.
Outcome criterion_6() {
  const auto rel_error = [](const PsiPtr& psi, double mu, double delta,
                            int segments) {
    const MeshPtr mesh = make_mesh(1.0, segments, 2.0);
    const double psi0 = psi->value(0.0);
    const auto h = WeightedGridFunction::sample_plain(
        mesh, psi, [&](double t) {
          return std::pow(psi->value(t) - psi0, delta - 1.0);
        });
    const WeightedGridFunction numeric = frac_integral(psi, mesh, mu, h);
    double sup_err = 0.0, sup_exact = 0.0;
    for (std::size_t j = 0; j < numeric.size(); ++j) {
      const double exact = frac_integral_power(*psi, mu, delta, mesh->node(j));
      sup_err = std::max(sup_err, std::fabs(numeric.value(j) - exact));
      sup_exact = std::max(sup_exact, std::fabs(exact));
    }
    return sup_err / sup_exact;
  };

  double worst_err = 0.0;
  double min_order = 1e300;
  bool pass = true;
  for (int which_psi = 0; which_psi < 2; ++which_psi) {
    const PsiPtr psi = make_psi(which_psi == 0 ? PsiFunction::identity()
                                               : PsiFunction::log_shift(1.0));
    for (double mu : {0.3, 0.5, 0.7}) {
      for (double delta : {1.0, 1.5, 2.0}) {
        const double coarse = rel_error(psi, mu, delta, 256);
        const double fine = rel_error(psi, mu, delta, 1024);
        worst_err = std::max(worst_err, fine);
        if (fine > 1e-3) pass = false;
        if (fine <= 1e-12) continue;  // integrand in the exactness class
        const double order = std::log(coarse / fine) / std::log(4.0);
        min_order = std::min(min_order, order);
        if (order < 1.5) pass = false;
      }
    }
  }
  return {pass, fmt("max rel error at N=1024 = %.3e (required <= 1e-3), min "
                    "empirical order = %.2f (required >= 1.5; roundoff-exact "
                    "cases gated at 1e-12 instead)",
                    worst_err, min_order)};
}

/// 7. The calculus identity suite (semigroup, power law, annihilation,
///    left/right inversion) over mu in {0.3, 0.5, 0.7} and nu in
///    {0, 0.5, 1} passes at tolerance 1e-3 with N = 1024.
Outcome criterion_7() {
  const PsiPtr psi = make_psi(PsiFunction::identity());
  const SuiteReport suite = run_identity_suite(psi, 1024, 1e-3);
  double worst = 0.0;
  int failed = 0;
  for (const SuiteCheck& check : suite.checks) {
    worst = std::max(worst, check.error);
    if (!check.pass) ++failed;
  }
  return {suite.all_pass,
          fmt("%zu checks, %d failed, max error = %.3e (required all pass at "
              "tolerance 1e-3)",
              suite.checks.size(), failed, worst)};
}

/// 8. Every undamped sweep output of the boundary-value map satisfies the
///    boundary combination by construction: defect <= 1e-10 for 20 random
///    small problems plus the periodic (a=1, b=-1, y0=0) and anti-periodic
///    (a=1, b=1, y0=0) combinations.
Outcome criterion_8() {
  std::mt19937_64 rng(424242ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);

  const auto bounded_u = [](double shift, double wiggle) {
    return [shift, wiggle](double t, double y, double x) {
      return shift + 0.3 * std::sin(wiggle * t) * y / (1.0 + y * y) +
             0.2 * std::cos(wiggle * t) * x / (1.0 + x * x);
    };
  };
  const auto bounded_w = [](double amp) {
    return [amp](double t, double y, double x) {
      return amp * std::cos(t) + 0.25 * y / (1.0 + std::fabs(y)) +
             0.15 * x / (1.0 + std::fabs(x));
    };
  };
  const auto bounded_v = [](double amp) {
    return [amp](double t, double y, double x) {
      return amp * std::sin(t + y - x) + 0.4 * t * std::cos(y);
    };
  };

  double worst = 0.0;
  int cases = 0;
  const auto run_case = [&](const HybridBvpProblem& problem) {
    const MeshPtr mesh = make_mesh(problem.T, 48, 2.0);
    const double xi = problem.order.xi();
    std::vector<double> zy(mesh->node_count()), zx(mesh->node_count());
    for (auto& z : zy) z = sym(rng);
    for (auto& z : zx) z = sym(rng);
    const WeightedGridFunction y(mesh, problem.psi, xi, std::move(zy));
    const WeightedGridFunction x(mesh, problem.psi, xi, std::move(zx));
    const auto step = picard_step_bvp(problem, y, x);
    const auto defects = boundary_defect(problem, step.first, step.second);
    worst = std::max(worst, std::max(defects.first, defects.second));
    ++cases;
  };

  for (int trial = 0; trial < 20; ++trial) {
    const double mu = 0.25 + 0.5 * unit(rng);
    const double nu = (trial % 3 == 0) ? 0.0 : (trial % 3 == 1 ? 0.5 : 1.0);
    const PsiPtr psi = make_psi(trial % 2 == 0 ? PsiFunction::identity()
                                               : PsiFunction::log_shift(1.0));
    run_case(HybridBvpProblem{.u1 = bounded_u(1.5 + unit(rng), 3.0 * sym(rng)),
                              .u2 = bounded_u(1.5 + unit(rng), 3.0 * sym(rng)),
                              .w1 = bounded_w(sym(rng)),
                              .w2 = bounded_w(sym(rng)),
                              .v1 = bounded_v(sym(rng)),
                              .v2 = bounded_v(sym(rng)),
                              .a = 0.5 + 2.0 * unit(rng),
                              .b = 0.2 + 1.5 * unit(rng),
                              .y0 = sym(rng),
                              .order = FracOrder(mu, nu),
                              .psi = psi,
                              .T = 1.0});
  }
  for (double b : {-1.0, 1.0}) {  // periodic, then anti-periodic
    run_case(HybridBvpProblem{.u1 = bounded_u(2.0, 1.0),
                              .u2 = bounded_u(2.2, -1.0),
                              .w1 = bounded_w(0.7),
                              .w2 = bounded_w(-0.4),
                              .v1 = bounded_v(0.9),
                              .v2 = bounded_v(0.6),
                              .a = 1.0,
                              .b = b,
                              .y0 = 0.0,
                              .order = FracOrder(0.5, 1.0),
                              .psi = make_psi(PsiFunction::identity()),
                              .T = 1.0});
  }
  const bool pass = worst <= 1e-10;
  return {pass, fmt("max boundary defect of one sweep = %.3e over %d cases "
                    "incl. periodic and anti-periodic (required <= 1e-10)",
                    worst, cases)};
}

/// 9. With nu = 0, Psi(t) = t, y0 = 0, k = 0 the generalized iteration map
///    collapses to the classical Riemann-Liouville hybrid map
///
///      y(t) = t^(1-mu) * [ w(t, y(t)) + u(t, y(t)) * (I^mu v)(t) ]
///
///    (stored-weighted form), coded here directly from that formula; the
///    two must agree to 1e-12 on random inputs at N = 128.
Outcome criterion_9() {
  std::mt19937_64 rng(1906ULL);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const PsiPtr psi = make_psi(PsiFunction::identity());

  double worst = 0.0;
  for (double mu : {0.3, 0.5, 0.7}) {
    const FracOrder order(mu, 0.0);
    const HybridIvpProblem problem{
        .u = [](double t, double s) { return 2.0 + 0.4 * std::sin(t + s); },
        .w = [](double t, double s) {
          return 0.5 * t * std::cos(s) + 0.3 * s / (1.0 + s * s);
        },
        .v = [](double t, double s, double q) {
          return std::sin(t) + 0.7 * s / (1.0 + std::fabs(s)) + q;
        },
        .k = 0.0,
        .y0 = 0.0,
        .order = order,
        .psi = psi,
        .T = 1.0,
        .u_at_origin = 2.0};
    const MeshPtr mesh = make_mesh(1.0, 128, 2.0);
    const FracIntegralOperator integral(psi, mesh, mu);

    // Directly coded classical map, working on the same stored-weighted
    // representation z = t^(1-mu) y.
    const auto direct_map = [&](const WeightedGridFunction& self,
                                const WeightedGridFunction& other) {
      const std::size_t n = self.size();
      std::vector<double> forcing(n, 0.0);
      for (std::size_t j = 1; j < n; ++j) {
        forcing[j] = problem.v(mesh->node(j),
                               other.unweighted_value(static_cast<int>(j)),
                               0.0);
      }
      const WeightedGridFunction v_grid(mesh, psi, 1.0, std::move(forcing));
      const WeightedGridFunction kernel = integral.apply(v_grid);
      std::vector<double> out(n, 0.0);
      for (std::size_t j = 1; j < n; ++j) {
        const double t = mesh->node(j);
        const double y_plain = self.unweighted_value(static_cast<int>(j));
        out[j] = std::pow(t, 1.0 - mu) *
                 (problem.w(t, y_plain) +
                  problem.u(t, y_plain) * kernel.values()[j]);
      }
      return WeightedGridFunction(mesh, psi, mu, std::move(out));
    };

    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> zy(mesh->node_count()), zx(mesh->node_count());
      for (auto& z : zy) z = sym(rng);
      for (auto& z : zx) z = sym(rng);
      const WeightedGridFunction y(mesh, psi, mu, std::move(zy));
      const WeightedGridFunction x(mesh, psi, mu, std::move(zx));
      const auto generic = picard_step_ivp(problem, y, x);
      worst = std::max(worst, max_abs_diff(generic.first, direct_map(y, x)));
      worst = std::max(worst, max_abs_diff(generic.second, direct_map(x, y)));
    }
  }
  const bool pass = worst <= 1e-12;
  return {pass, fmt("max |generic map - classical map| = %.3e over 15 random "
                    "pairs, mu in {0.3, 0.5, 0.7} (required <= 1e-12)",
                    worst)};
}

// ---------------------------------------------------------------------------

struct Criterion {
  int number;
  const char* title;
  double cap_seconds;
  Outcome (*run)();
};

const Criterion criteria[] = {
    {1, "existence bound, first example", 1.0, criterion_1},
    {2, "existence bound, second example", 1.0, criterion_2},
    {3, "boundary constants at the exact pair", 1.0, criterion_3},
    {4, "initial-value solve from zero guess", 30.0, criterion_4},
    {5, "boundary-value solve from perturbed guess", 30.0, criterion_5},
    {6, "quadrature vs closed form", 60.0, criterion_6},
    {7, "calculus identity suite", 120.0, criterion_7},
    {8, "boundary defect by construction", 30.0, criterion_8},
    {9, "classical-limit reduction of the iteration map", 10.0, criterion_9},
};

bool run_criterion(const Criterion& criterion) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = criterion.run();
  } catch (const std::exception& e) {
    outcome = {false, std::string("threw: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const bool in_time = seconds <= criterion.cap_seconds;
  const bool pass = outcome.pass && in_time;
  std::printf("criterion %d: %s - %s: %s [%.2f s %s %.0f s]\n",
              criterion.number, pass ? "PASS" : "FAIL", criterion.title,
              outcome.detail.c_str(), seconds, in_time ? "<" : ">=",
              criterion.cap_seconds);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::fprintf(stderr, "usage: %s [criterion-number]\n", argv[0]);
    return 2;
  }
  std::optional<int> only;
  if (argc == 2) {
    only = std::atoi(argv[1]);
    if (*only < 1 || *only > 9) {
      std::fprintf(stderr, "criterion number must be 1..9, got '%s'\n",
                   argv[1]);
      return 2;
    }
  }
  bool all_pass = true;
  for (const Criterion& criterion : criteria) {
    if (only && criterion.number != *only) continue;
    all_pass = run_criterion(criterion) && all_pass;
  }
  return all_pass ? 0 : 1;
}
