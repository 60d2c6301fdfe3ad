#pragma once

/// Built-in benchmark problems.
///
/// Each registered example carries a canonical configuration text (exactly
/// what a user could save to a file and pass to the CLI) plus native C++
/// evaluators for its coefficient functions.  The native evaluators compute
/// the same formulas as the configuration's expression strings — a unit test
/// compares the two on a sample grid — and exist for two reasons: the inner
/// solver loops skip the expression interpreter, and example2's v2 needs a
/// convention the strict expression language deliberately refuses: its
/// numerator and denominator vanish together at the single corner point
/// t = T, y = x = T reached along the exact solution, where the limit is 0.
///
/// Both examples have the exact solution pair (y, x) = (t, t), which is what
/// makes them useful benchmarks: solver output can be compared against a
/// known curve, and the forcing terms vanish identically along it.

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "psihilfer/config.hpp"
#include "psihilfer/errors.hpp"
#include "psihilfer/hybrid_bvp.hpp"
#include "psihilfer/hybrid_ivp.hpp"

namespace psihilfer {

/// One built-in problem: a name, a one-line summary, the canonical
/// configuration text, and native replacements for the parsed functions.
struct RegisteredExample {
  std::string name;
  std::string summary;
  std::string config_text;
  std::function<void(HybridIvpProblem&)> install_native_ivp;
  std::function<void(HybridBvpProblem&)> install_native_bvp;

  /// Parse the canonical configuration text.
  ProblemConfig parse() const { return parse_problem_config(config_text); }

  /// Fully-built IVP problem with native coefficient evaluators.
  HybridIvpProblem ivp_problem() const {
    ProblemConfig cfg = parse();
    if (cfg.kind != ProblemKind::ivp) {
      throw InvalidArgument("example '" + name + "' is not an ivp problem");
    }
    HybridIvpProblem problem = build_ivp_problem(cfg);
    if (install_native_ivp) install_native_ivp(problem);
    return problem;
  }

  /// Fully-built BVP problem with native coefficient evaluators.
  HybridBvpProblem bvp_problem() const {
    ProblemConfig cfg = parse();
    if (cfg.kind != ProblemKind::bvp) {
      throw InvalidArgument("example '" + name + "' is not a bvp problem");
    }
    HybridBvpProblem problem = build_bvp_problem(cfg);
    if (install_native_bvp) install_native_bvp(problem);
    return problem;
  }
};

namespace registry_detail {

inline const char* example1_config() {
  return R"cfg(# Coupled initial-value benchmark; exact solution y(t) = x(t) = t.
[problem]
kind = ivp
mu = 1/2
nu = 1
T = 1

[psi]
kind = identity

[constants]
y0 = 0
k = 1

[functions]
u = "(97/70)*(t*y - 2)"
w = "t*y + t - 2"
v = "y^2/(1 + y^2) - (3*sqrt(pi)/4)*sqrt(t)*q/((3*sqrt(pi)/4)*sqrt(t)*q + 1)"

[overrides]
u_at_origin = -97/35

[solver]
N = 512
r = 1
max_iter = 2000
relaxation = 0.5

[hypothesis]
sigma = 1/10
delta = 7/97
g_norm = 2
y0_over_u0 = 0
)cfg";
}

inline const char* example2_config() {
  return R"cfg(# Coupled two-point benchmark, 3 z(0) + z(1) = 1; exact solution y = x = t.
[problem]
kind = bvp
mu = 1/3
nu = 1
T = 1

[psi]
kind = identity

[constants]
a = 3
b = 1
y0 = 1

[functions]
u1 = "(17/297)*(t*y/3 + t*x/2 + 5/6)"
w1 = "(17/21)*t*y + x + 17/21"
v1 = "exp(-t^2)/97*(y/(2 + y) - x/(2 + x))"
u2 = "(t*y/5 + t*x + 12)/98"
w2 = "(t/10)*(y + x + 10) + 2"
v2 = "2^(-t)/87*(t^2 - x*y)/(1 - x*y)"

[solver]
N = 512
r = 1
max_iter = 2000
relaxation = 0.5

[hypothesis]
sigma1 = 1/99
sigma2 = 1/98
delta1 = 2/7
delta2 = 1/10
g1_norm = 2/97
g2_norm = 1/87
omega1_abs = 38016/2975
omega2_abs = 539/123
)cfg";
}

inline void example1_native(HybridIvpProblem& problem) {
  problem.u = [](double t, double s) { return (97.0 / 70.0) * (t * s - 2.0); };
  problem.w = [](double t, double s) { return t * s + t - 2.0; };
  problem.v = [](double t, double p, double q) {
    const double fed = (3.0 * std::sqrt(std::numbers::pi) / 4.0) *
                       std::sqrt(t) * q;
    return p * p / (1.0 + p * p) - fed / (fed + 1.0);
  };
}

inline void example2_native(HybridBvpProblem& problem) {
  problem.u1 = [](double t, double y, double x) {
    return (17.0 / 297.0) * (t * y / 3.0 + t * x / 2.0 + 5.0 / 6.0);
  };
  problem.w1 = [](double t, double y, double x) {
    return (17.0 / 21.0) * t * y + x + 17.0 / 21.0;
  };
  problem.v1 = [](double t, double y, double x) {
    return std::exp(-(t * t)) / 97.0 * (y / (2.0 + y) - x / (2.0 + x));
  };
  problem.u2 = [](double t, double y, double x) {
    return (t * y / 5.0 + t * x + 12.0) / 98.0;
  };
  problem.w2 = [](double t, double y, double x) {
    return (t / 10.0) * (y + x + 10.0) + 2.0;
  };
  problem.v2 = [](double t, double y, double x) {
    const double numerator = t * t - x * y;
    const double denominator = 1.0 - x * y;
    // Removable corner: along the exact solution both vanish at t = T = 1;
    // the limit along that curve is 0.  A true pole still divides by zero
    // and is caught by the solver's finiteness check.
    if (numerator == 0.0 && denominator == 0.0) return 0.0;
    return std::pow(2.0, -t) / 87.0 * numerator / denominator;
  };
}

}  // namespace registry_detail

/// All built-in examples, in presentation order.
inline const std::vector<RegisteredExample>& example_registry() {
  static const std::vector<RegisteredExample> registry = {
      RegisteredExample{
          .name = "example1",
          .summary =
              "coupled hybrid initial-value system with exact solution "
              "(t, t)",
          .config_text = registry_detail::example1_config(),
          .install_native_ivp = registry_detail::example1_native,
          .install_native_bvp = nullptr},
      RegisteredExample{
          .name = "example2",
          .summary =
              "coupled hybrid two-point system, 3 z(0) + z(1) = 1, with "
              "exact solution (t, t)",
          .config_text = registry_detail::example2_config(),
          .install_native_ivp = nullptr,
          .install_native_bvp = registry_detail::example2_native}};
  return registry;
}

/// Look up a built-in example; nullptr when the name is not registered.
inline const RegisteredExample* find_example(std::string_view name) {
  for (const auto& example : example_registry()) {
    if (example.name == name) return &example;
  }
  return nullptr;
}

/// Human-readable description of one example: header line, problem scalars,
/// the coefficient functions re-printed from their parsed expression trees,
/// and the hypothesis scalars.  The output is locked by a golden file, so
/// changes here are deliberate interface changes.
inline std::string describe_example(const RegisteredExample& example) {
  const ProblemConfig cfg = example.parse();
  std::ostringstream out;
  out << std::setprecision(15);
  out << example.name << ": " << example.summary << "\n";
  out << "  kind = " << to_string(cfg.kind) << ", mu = " << cfg.mu
      << ", nu = " << cfg.nu << ", T = " << cfg.T
      << ", psi = " << cfg.psi.kind << "\n";
  if (cfg.kind == ProblemKind::ivp) {
    out << "  y0 = " << cfg.y0 << ", k = " << cfg.k;
    if (cfg.u_at_origin) out << ", u_at_origin = " << *cfg.u_at_origin;
    out << "\n";
    out << "  u(t,y)   = " << cfg.functions.at("u").pretty() << "\n";
    out << "  w(t,y)   = " << cfg.functions.at("w").pretty() << "\n";
    out << "  v(t,y,q) = " << cfg.functions.at("v").pretty() << "\n";
  } else {
    out << "  a = " << cfg.a << ", b = " << cfg.b << ", y0 = " << cfg.y0
        << "\n";
    for (const char* name : {"u1", "w1", "v1", "u2", "w2", "v2"}) {
      out << "  " << name << "(t,y,x) = " << cfg.functions.at(name).pretty()
          << "\n";
    }
  }
  if (cfg.has_hypothesis) {
    out << "  hypothesis:";
    for (const auto& [key, value] : cfg.hypothesis) {
      out << " " << key << " = " << value << ",";
    }
    std::string line = out.str();
    line.pop_back();  // trailing comma
    return line + "\n";
  }
  return out.str();
}

}  // namespace psihilfer
