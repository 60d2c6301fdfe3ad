#pragma once

/// \file hybrid_bvp.hpp
/// Damped Picard solver for a coupled pair of nonlinear hybrid fractional
/// differential equations under a two-point boundary condition.
///
/// The continuous problem: find y, x on [0, T] with
///
///   D^{mu,nu;Psi} [ (y(t) - w1(t, y, x)) / u1(t, y, x) ] = v1(t, y, x),
///   D^{mu,nu;Psi} [ (x(t) - w2(t, y, x)) / u2(t, y, x) ] = v2(t, y, x),
///
/// subject to the weighted two-point conditions (xi = mu + nu(1-mu))
///
///   a * lim_{t->0+} (Psi(t)-Psi(0))^{1-xi} y(t)
///       + b * (Psi(T)-Psi(0))^{1-xi} y(T) = y0,
///
/// and the same combination for x.  Unlike the initial-value form, the two
/// equations carry their own nonlinearities (u1, w1, v1) and (u2, w2, v2),
/// each fed with both unknowns.
///
/// The iteration map is the equivalent integral form
///
///   y_next(t) = w1(t, y, x) + u1(t, y, x) *
///       [ Omega_1 * (Psi(t)-Psi(0))^{xi-1} + (I^{mu;Psi} v1(., y, x))(t) ],
///
/// (and likewise for x with index 2), where the boundary constant Omega_i is
/// re-derived from the current iterate on every sweep so that each output
/// satisfies the boundary combination exactly -- for every iterate, not only
/// at the fixed point.  Writing U0_i and W0_i for the weighted limits of u_i
/// and w_i at t -> 0+ along the iterate, imposing the condition on y_next
/// gives
///
///   Omega_i = [ y0 - a * W0_i
///               - b * (Psi(T)-Psi(0))^{1-xi} * (w_i(T) + u_i(T) * I_i(T)) ]
///             / [ a * U0_i + b * u_i(T) ],
///
/// with I_i(T) the forcing integral at the right endpoint.  For xi = 1 the
/// limits are the plain evaluations at t = 0; for xi < 1 the weight kills
/// the offset (W0_i = 0) and the multiplier limit is taken from the optional
/// u1_at_origin / u2_at_origin overrides when provided, else approximated by
/// evaluating u_i at the first positive mesh node along the iterate.  The
/// same limit values are reused for the node-0 output, which keeps the
/// boundary combination of every sweep output at y0 to roundoff by
/// construction.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psihilfer/errors.hpp"
#include "psihilfer/frac_integral.hpp"
#include "psihilfer/frac_order.hpp"
#include "psihilfer/grid_function.hpp"
#include "psihilfer/mesh.hpp"
#include "psihilfer/psi_function.hpp"
#include "psihilfer/solver_types.hpp"

namespace psihilfer {

/// Data of the coupled hybrid boundary-value problem.  All six nonlinearity
/// callables receive (t, y(t), x(t)).  `a` must be nonzero; `b = 0` reduces
/// the boundary combination to a weighted initial condition.
///
/// `u1_at_origin` / `u2_at_origin` optionally pin the weighted limits of the
/// multipliers at t -> 0+.  They matter only when xi < 1 (for xi = 1 the
/// limits are evaluated directly); when absent, the first positive mesh node
/// stands in for the origin.
struct HybridBvpProblem {
  std::function<double(double, double, double)> u1;
  std::function<double(double, double, double)> u2;
  std::function<double(double, double, double)> w1;
  std::function<double(double, double, double)> w2;
  std::function<double(double, double, double)> v1;
  std::function<double(double, double, double)> v2;
  double a = 0.0;
  double b = 0.0;
  double y0 = 0.0;
  FracOrder order;
  PsiPtr psi;
  double T = 1.0;
  std::optional<double> u1_at_origin;
  std::optional<double> u2_at_origin;
};

/// Boundary constants of one sweep, with the denominators they were divided
/// by (useful for conditioning diagnostics).
struct OmegaPair {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double denominator1 = 0.0;
  double denominator2 = 0.0;
};

namespace detail {

inline void validate_bvp_problem(const HybridBvpProblem& problem) {
  if (!problem.u1 || !problem.u2 || !problem.w1 || !problem.w2 ||
      !problem.v1 || !problem.v2) {
    throw InvalidArgument(
        "hybrid bvp: u1, u2, w1, w2, v1 and v2 must all be callable");
  }
  if (!problem.psi) {
    throw InvalidArgument("hybrid bvp: psi must be non-null");
  }
  if (!std::isfinite(problem.T) || problem.T <= 0.0) {
    throw InvalidArgument("hybrid bvp: horizon T must be positive, got " +
                          std::to_string(problem.T));
  }
  if (!std::isfinite(problem.a) || problem.a == 0.0) {
    throw InvalidArgument(
        "hybrid bvp: boundary coefficient a must be nonzero and finite");
  }
  if (!std::isfinite(problem.b)) {
    throw InvalidArgument("hybrid bvp: boundary coefficient b must be finite");
  }
  if (!std::isfinite(problem.y0)) {
    throw InvalidArgument("hybrid bvp: boundary value y0 must be finite");
  }
  for (const auto& override_value :
       {problem.u1_at_origin, problem.u2_at_origin}) {
    if (override_value &&
        (!std::isfinite(*override_value) || *override_value == 0.0)) {
      throw InvalidArgument(
          "hybrid bvp: an origin multiplier override must be nonzero and "
          "finite when provided");
    }
  }
}

/// Everything one sweep needs, assembled consistently from one iterate:
/// plain state values, forcing integrals, origin limits and the boundary
/// constants derived from them.
struct BvpSweepParts {
  std::vector<double> y_plain;  ///< unweighted iterate values; index 0 valid
                                ///< only when xi = 1
  std::vector<double> x_plain;
  WeightedGridFunction integral1;  ///< I^{mu} v1(., y, x), plain values
  WeightedGridFunction integral2;
  double u1_origin = 0.0;  ///< weighted limits used at node 0 and in Omega
  double u2_origin = 0.0;
  double w1_origin = 0.0;  ///< zero when xi < 1
  double w2_origin = 0.0;
  OmegaPair omega;
};

/// Weighted limit of a multiplier at t -> 0+ along the iterate; see the
/// file comment for the xi < 1 proxy rule.
inline double origin_multiplier(
    const std::function<double(double, double, double)>& u,
    const std::optional<double>& override_value, bool plain_grid,
    const std::vector<double>& t_nodes, const std::vector<double>& y_plain,
    const std::vector<double>& x_plain, int equation_index) {
  double value = 0.0;
  if (plain_grid) {
    value = u(0.0, y_plain[0], x_plain[0]);
  } else if (override_value) {
    value = *override_value;
  } else {
    value = u(t_nodes[1], y_plain[1], x_plain[1]);
  }
  if (!std::isfinite(value) || value == 0.0) {
    throw DegenerateMultiplier(
        "hybrid bvp: multiplier u" + std::to_string(equation_index) +
            " is zero or non-finite at the origin limit",
        0.0);
  }
  return value;
}

inline BvpSweepParts bvp_assemble(const HybridBvpProblem& problem,
                                  const FracIntegralOperator& integral,
                                  const WeightedGridFunction& y,
                                  const WeightedGridFunction& x) {
  const double xi = problem.order.xi();
  const bool plain = xi == 1.0;
  const MeshPtr& mesh = y.mesh_ptr();
  const auto& t_nodes = mesh->nodes();
  const std::size_t n = y.size();
  const int last = static_cast<int>(n) - 1;

  std::vector<double> y_plain(n, 0.0);
  std::vector<double> x_plain(n, 0.0);
  if (plain) {
    y_plain = y.values();
    x_plain = x.values();
  } else {
    for (int j = 1; j < static_cast<int>(n); ++j) {
      y_plain[static_cast<std::size_t>(j)] = y.unweighted_value(j);
      x_plain[static_cast<std::size_t>(j)] = x.unweighted_value(j);
    }
  }

  // Forcing grids.  The growth hypothesis on v_i makes the forcing vanish
  // at t -> 0+ when xi < 1, so the samples are plain in either case.
  std::vector<double> f1(n, 0.0);
  std::vector<double> f2(n, 0.0);
  const std::size_t first = plain ? 0 : 1;
  for (std::size_t j = first; j < n; ++j) {
    f1[j] = problem.v1(t_nodes[j], y_plain[j], x_plain[j]);
    f2[j] = problem.v2(t_nodes[j], y_plain[j], x_plain[j]);
    if (!std::isfinite(f1[j]) || !std::isfinite(f2[j])) {
      throw EvalError("hybrid forcing returned a non-finite value at t=" +
                      std::to_string(t_nodes[j]));
    }
  }
  WeightedGridFunction integral1 = integral.apply(
      WeightedGridFunction(mesh, y.psi_ptr(), 1.0, std::move(f1)));
  WeightedGridFunction integral2 = integral.apply(
      WeightedGridFunction(mesh, y.psi_ptr(), 1.0, std::move(f2)));

  // Origin limits, shared between the boundary constants and node 0.
  const double u1_origin =
      origin_multiplier(problem.u1, problem.u1_at_origin, plain, t_nodes,
                        y_plain, x_plain, 1);
  const double u2_origin =
      origin_multiplier(problem.u2, problem.u2_at_origin, plain, t_nodes,
                        y_plain, x_plain, 2);
  const double w1_origin =
      plain ? problem.w1(0.0, y_plain[0], x_plain[0]) : 0.0;
  const double w2_origin =
      plain ? problem.w2(0.0, y_plain[0], x_plain[0]) : 0.0;
  if (!std::isfinite(w1_origin) || !std::isfinite(w2_origin)) {
    throw EvalError("hybrid offset returned a non-finite value at t=0");
  }

  // Right-endpoint data and the boundary constants.
  const double t_end = t_nodes[n - 1];
  const double weight_end =
      plain ? 1.0 : std::pow(integral.tau(n - 1), 1.0 - xi);
  OmegaPair omega;
  for (int i = 1; i <= 2; ++i) {
    const auto& u = (i == 1) ? problem.u1 : problem.u2;
    const auto& w = (i == 1) ? problem.w1 : problem.w2;
    const double u_origin = (i == 1) ? u1_origin : u2_origin;
    const double w_origin = (i == 1) ? w1_origin : w2_origin;
    const auto& forcing_integral = (i == 1) ? integral1 : integral2;

    const double u_end = u(t_end, y_plain[n - 1], x_plain[n - 1]);
    const double w_end = w(t_end, y_plain[n - 1], x_plain[n - 1]);
    if (!std::isfinite(u_end) || !std::isfinite(w_end)) {
      throw EvalError("hybrid nonlinearity returned a non-finite value at t=" +
                      std::to_string(t_end));
    }
    const double integral_end = forcing_integral.value(last);

    const double denominator = problem.a * u_origin + problem.b * u_end;
    const double scale = std::fabs(problem.a * u_origin) +
                         std::fabs(problem.b * u_end) + 1.0;
    if (std::fabs(denominator) < 1e-12 * scale) {
      throw SingularBoundaryOperator(
          "hybrid bvp: boundary operator a*u" + std::to_string(i) +
              "(0) + b*u" + std::to_string(i) +
              "(T) is numerically singular (value " +
              std::to_string(denominator) + ")",
          i);
    }
    const double numerator =
        problem.y0 - problem.a * w_origin -
        problem.b * weight_end * (w_end + u_end * integral_end);
    const double value = numerator / denominator;
    if (i == 1) {
      omega.omega1 = value;
      omega.denominator1 = denominator;
    } else {
      omega.omega2 = value;
      omega.denominator2 = denominator;
    }
  }

  return BvpSweepParts{std::move(y_plain), std::move(x_plain),
                       std::move(integral1), std::move(integral2),
                       u1_origin,           u2_origin,
                       w1_origin,           w2_origin,
                       omega};
}

/// One equation's output grid from assembled sweep parts.
inline WeightedGridFunction bvp_equation_output(
    const HybridBvpProblem& problem, const BvpSweepParts& parts,
    const WeightedGridFunction& reference, int equation_index) {
  const double xi = problem.order.xi();
  const bool plain = xi == 1.0;
  const MeshPtr& mesh = reference.mesh_ptr();
  const auto& t_nodes = mesh->nodes();
  const std::size_t n = reference.size();

  const auto& u = (equation_index == 1) ? problem.u1 : problem.u2;
  const auto& w = (equation_index == 1) ? problem.w1 : problem.w2;
  const auto& forcing_integral =
      (equation_index == 1) ? parts.integral1 : parts.integral2;
  const double omega =
      (equation_index == 1) ? parts.omega.omega1 : parts.omega.omega2;
  const double u_origin =
      (equation_index == 1) ? parts.u1_origin : parts.u2_origin;
  const double w_origin =
      (equation_index == 1) ? parts.w1_origin : parts.w2_origin;

  std::vector<double> out(n, 0.0);
  // Node 0 reuses the origin limits that entered Omega, which is what makes
  // the boundary combination of the output exact by construction.
  out[0] = plain ? w_origin + u_origin * omega : u_origin * omega;
  for (std::size_t j = 1; j < n; ++j) {
    const int ij = static_cast<int>(j);
    const double t = t_nodes[j];
    const double u_val = u(t, parts.y_plain[j], parts.x_plain[j]);
    if (!std::isfinite(u_val) || u_val == 0.0) {
      throw DegenerateMultiplier(
          "picard_step_bvp: multiplier u" + std::to_string(equation_index) +
              " is zero or non-finite at a mesh node",
          t);
    }
    const double w_val = w(t, parts.y_plain[j], parts.x_plain[j]);
    if (!std::isfinite(w_val)) {
      throw EvalError("hybrid offset returned a non-finite value at t=" +
                      std::to_string(t));
    }
    const double wgt = plain ? 1.0 : std::pow(reference.tau(ij), 1.0 - xi);
    out[j] = u_val * (omega + wgt * forcing_integral.values()[j]) + wgt * w_val;
  }
  return WeightedGridFunction(mesh, reference.psi_ptr(), xi, std::move(out));
}

inline void require_bvp_pair(const HybridBvpProblem& problem,
                             const WeightedGridFunction& y,
                             const WeightedGridFunction& x) {
  require_solver_pair(problem.psi, problem.order.xi(), problem.T, y, x,
                      "hybrid bvp");
}

}  // namespace detail

/// Boundary constants the sweep would use for the given iterate pair:
/// Omega_i together with the denominator a*u_i(0) + b*u_i(T) it was divided
/// by.  Throws SingularBoundaryOperator when a denominator is numerically
/// singular relative to its terms.
inline OmegaPair compute_omega(const HybridBvpProblem& problem,
                               const WeightedGridFunction& y,
                               const WeightedGridFunction& x) {
  detail::validate_bvp_problem(problem);
  detail::require_bvp_pair(problem, y, x);
  const FracIntegralOperator integral(problem.psi, y.mesh_ptr(),
                                      problem.order.mu());
  return detail::bvp_assemble(problem, integral, y, x).omega;
}

/// One undamped Picard sweep of the coupled pair: equation 1 produces
/// y_next, equation 2 produces x_next, both from the current pair.  Each
/// output satisfies the weighted boundary combination exactly.
inline std::pair<WeightedGridFunction, WeightedGridFunction> picard_step_bvp(
    const HybridBvpProblem& problem, const WeightedGridFunction& y,
    const WeightedGridFunction& x) {
  detail::validate_bvp_problem(problem);
  detail::require_bvp_pair(problem, y, x);
  const FracIntegralOperator integral(problem.psi, y.mesh_ptr(),
                                      problem.order.mu());
  const auto parts = detail::bvp_assemble(problem, integral, y, x);
  return {detail::bvp_equation_output(problem, parts, y, 1),
          detail::bvp_equation_output(problem, parts, x, 2)};
}

/// How far a pair is from meeting the weighted boundary combination:
/// (|a z_y(0) + b z_y(T) - y0|, |a z_x(0) + b z_x(T) - y0|), evaluated on
/// the stored weighted values.
inline std::pair<double, double> boundary_defect(
    const HybridBvpProblem& problem, const WeightedGridFunction& y,
    const WeightedGridFunction& x) {
  detail::validate_bvp_problem(problem);
  detail::require_bvp_pair(problem, y, x);
  const auto defect = [&](const WeightedGridFunction& f) {
    const int last = static_cast<int>(f.size()) - 1;
    return std::fabs(problem.a * f.value(0) + problem.b * f.value(last) -
                     problem.y0);
  };
  return {defect(y), defect(x)};
}

/// Distance of a pair from being a fixed point of the boundary-value Picard
/// map, as the weighted max-norm of one undamped sweep's movement.
inline std::pair<double, double> residual_bvp(const HybridBvpProblem& problem,
                                              const WeightedGridFunction& y,
                                              const WeightedGridFunction& x) {
  const auto step = picard_step_bvp(problem, y, x);
  return {max_abs_diff(y, step.first), max_abs_diff(x, step.second)};
}

/// Runs the damped Picard iteration to a fixed point of the coupled
/// boundary-value integral equations.
///
/// Starts from config.initial_guess when present, otherwise from the
/// weighted-constant pair z == y0 / (a + b), which satisfies the boundary
/// form a z(0) + b z(T) = y0 from iterate zero (z == 0 when a + b == 0).
/// The boundary constants are re-derived from the current iterate on every
/// sweep.  Non-convergence is reported through the result, not thrown.
inline SolutionPair solve_coupled_bvp(const HybridBvpProblem& problem,
                                      const SolverConfig& config) {
  detail::validate_bvp_problem(problem);
  detail::validate_solver_config(config);

  const double xi = problem.order.xi();
  const double trace_sum = problem.a + problem.b;
  const double flat = trace_sum != 0.0 ? problem.y0 / trace_sum : 0.0;
  WeightedGridFunction y = config.initial_guess
                               ? config.initial_guess->first
                               : WeightedGridFunction::sample_weighted(
                                     config.mesh, problem.psi, xi,
                                     [&](double) { return flat; });
  WeightedGridFunction x =
      config.initial_guess ? config.initial_guess->second : y;
  detail::require_bvp_pair(problem, y, x);
  if (y.mesh_ptr().get() != config.mesh.get() &&
      !same_mesh(y.mesh(), *config.mesh)) {
    throw InvalidArgument(
        "solve_coupled_bvp: initial guess does not live on config.mesh");
  }

  const FracIntegralOperator integral(problem.psi, y.mesh_ptr(),
                                      problem.order.mu());
  const auto sweep = [&](const WeightedGridFunction& cy,
                         const WeightedGridFunction& cx) {
    const auto parts = detail::bvp_assemble(problem, integral, cy, cx);
    return std::make_pair(detail::bvp_equation_output(problem, parts, cy, 1),
                          detail::bvp_equation_output(problem, parts, cx, 2));
  };
  SolutionPair result =
      detail::damped_fixed_point(sweep, std::move(y), std::move(x), config);
  const auto final_step = sweep(result.y, result.x);
  result.residual_y = max_abs_diff(result.y, final_step.first);
  result.residual_x = max_abs_diff(result.x, final_step.second);
  return result;
}

}  // namespace psihilfer
