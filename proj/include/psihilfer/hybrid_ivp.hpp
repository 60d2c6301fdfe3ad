#pragma once

/// \file hybrid_ivp.hpp
/// Damped Picard solver for a symmetric pair of coupled nonlinear hybrid
/// fractional differential equations in initial-value form.
///
/// The continuous problem: find y, x on [0, T] with
///
///   D^{mu,nu;Psi} [ (y(t) - w(t, y(t))) / u(t, y(t)) ]
///       = v(t, x(t), k * (I^{mu;Psi} x)(t)),
///   D^{mu,nu;Psi} [ (x(t) - w(t, x(t))) / u(t, x(t)) ]
///       = v(t, y(t), k * (I^{mu;Psi} y)(t)),
///
/// subject to the weighted initial condition
/// lim_{t->0+} (Psi(t)-Psi(0))^{1-xi} y(t) = y0 (and the same for x), where
/// xi = mu + nu(1-mu).  Each equation feeds on the *other* unknown through
/// the forcing v, which also sees that unknown's running fractional integral
/// scaled by k.
///
/// The iteration map is the equivalent integral form
///
///   y_next(t) = w(t, y(t)) + u(t, y(t)) *
///       [ c * (Psi(t)-Psi(0))^{xi-1}
///         + (I^{mu;Psi} v(., x, k * I^{mu;Psi} x))(t) ],
///
/// with the constant c pinned by the weighted initial condition on y_next,
/// so every iterate -- not only the fixed point -- satisfies the initial
/// condition.  Writing W0 and U0 for the weighted limits of w and u at
/// t -> 0+, the condition gives c = (y0 - W0) / U0.  For xi < 1 the weight
/// kills the offset (W0 = 0) and the multiplier limit cannot be read off the
/// pointwise u (its state argument diverges), so the problem data carries it
/// as u_at_origin; for xi = 1 both limits are evaluated from the current
/// iterate as w(0, y(0)) and u(0, y(0)).
///
/// All grid functions are stored in weighted form, so the xi < 1 endpoint
/// singularity never appears as an actual infinity anywhere in the scheme.

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

/// Data of the coupled hybrid initial-value problem.  The same u, w, v serve
/// both equations; the coupling is through the argument swap.
///
/// `u(t, s)` multiplies the bracket and must stay away from zero along the
/// iteration; `w(t, s)` is the additive offset; `v(t, other, inner)` is the
/// forcing, fed with the other component's value and k times its running
/// fractional integral.  `u_at_origin` is the weighted limit of u along the
/// solution at t -> 0+; it enters the initial-condition constant when xi < 1
/// and is required to be nonzero in all cases as part of the problem's
/// well-posedness data.
struct HybridIvpProblem {
  std::function<double(double, double)> u;
  std::function<double(double, double)> w;
  std::function<double(double, double, double)> v;
  double k = 1.0;
  double y0 = 0.0;
  FracOrder order;
  PsiPtr psi;
  double T = 1.0;
  double u_at_origin = 0.0;
};

namespace detail {

inline void validate_ivp_problem(const HybridIvpProblem& problem) {
  if (!problem.u || !problem.w || !problem.v) {
    throw InvalidArgument("hybrid ivp: u, w and v must all be callable");
  }
  if (!problem.psi) {
    throw InvalidArgument("hybrid ivp: psi must be non-null");
  }
  if (!std::isfinite(problem.T) || problem.T <= 0.0) {
    throw InvalidArgument("hybrid ivp: horizon T must be positive, got " +
                          std::to_string(problem.T));
  }
  if (!std::isfinite(problem.y0)) {
    throw InvalidArgument("hybrid ivp: initial value y0 must be finite");
  }
  if (!std::isfinite(problem.k)) {
    throw InvalidArgument("hybrid ivp: inner-integral scale k must be finite");
  }
  if (!std::isfinite(problem.u_at_origin) || problem.u_at_origin == 0.0) {
    throw InvalidArgument(
        "hybrid ivp: u_at_origin (the weighted limit of the multiplier at "
        "t -> 0+) must be set to a nonzero finite value");
  }
}

/// Iterate-pair compatibility for the initial-value problem.
inline void require_iterate_pair(const HybridIvpProblem& problem,
                                 const WeightedGridFunction& y,
                                 const WeightedGridFunction& x) {
  require_solver_pair(problem.psi, problem.order.xi(), problem.T, y, x,
                      "hybrid ivp");
}

/// Plain (unweighted) value of a grid function at node j >= 1, regardless of
/// how it is stored.
inline double plain_at(const WeightedGridFunction& f, int j) {
  return f.xi() == 1.0 ? f.value(j) : f.unweighted_value(j);
}

/// One half of a Picard sweep: the next iterate of `self`, driven by
/// `other` through the forcing.  `integral` must be built on the iterate's
/// mesh with order mu.
inline WeightedGridFunction ivp_half_step(const HybridIvpProblem& problem,
                                          const FracIntegralOperator& integral,
                                          const WeightedGridFunction& self,
                                          const WeightedGridFunction& other) {
  const double xi = problem.order.xi();
  const bool plain = xi == 1.0;
  const MeshPtr& mesh = self.mesh_ptr();
  const auto& t_nodes = mesh->nodes();
  const std::size_t n = self.size();

  // Forcing samples v(t_j, other(t_j), k * (I^mu other)(t_j)).  The growth
  // hypothesis on v makes the forcing vanish at t -> 0+ when xi < 1, so its
  // samples form a plain (xi = 1) grid function in either case.
  std::vector<double> forcing(n, 0.0);
  std::optional<WeightedGridFunction> inner;
  if (problem.k != 0.0) inner = integral.apply(other);
  for (std::size_t j = 1; j < n; ++j) {
    const int ij = static_cast<int>(j);
    const double other_val = plain ? other.values()[j] : other.unweighted_value(ij);
    const double q = inner ? problem.k * plain_at(*inner, ij) : 0.0;
    const double vj = problem.v(t_nodes[j], other_val, q);
    if (!std::isfinite(vj)) {
      throw EvalError("hybrid forcing v returned a non-finite value at t=" +
                      std::to_string(t_nodes[j]));
    }
    forcing[j] = vj;
  }
  if (plain) {
    // The inner integral vanishes at t = 0 for any bounded input.
    const double v0 = problem.v(0.0, other.values()[0], 0.0);
    if (!std::isfinite(v0)) {
      throw EvalError("hybrid forcing v returned a non-finite value at t=0");
    }
    forcing[0] = v0;
  }
  const WeightedGridFunction v_grid(mesh, self.psi_ptr(), 1.0,
                                    std::move(forcing));
  // Plain input of order mu > 0 gives a plain output vanishing at t = 0.
  const WeightedGridFunction integral_term = integral.apply(v_grid);

  // Initial-condition constant of this sweep; see the file comment.
  double w_limit = 0.0;
  double u_limit = problem.u_at_origin;
  if (plain) {
    const double self0 = self.values()[0];
    w_limit = problem.w(0.0, self0);
    if (!std::isfinite(w_limit)) {
      throw EvalError("hybrid offset w returned a non-finite value at t=0");
    }
    u_limit = problem.u(0.0, self0);
    if (!std::isfinite(u_limit) || u_limit == 0.0) {
      throw DegenerateMultiplier(
          "picard_step_ivp: multiplier u(0, y(0)) is zero or non-finite",
          0.0);
    }
  }
  const double c = (problem.y0 - w_limit) / u_limit;

  std::vector<double> out(n, 0.0);
  // Node 0.  For xi < 1 the limit algebra collapses to y0 exactly, so it is
  // assigned rather than pushed through the division round trip; for xi = 1
  // the same cancellation holds up to a few ulps.
  out[0] = plain ? w_limit + u_limit * c : problem.y0;
  for (std::size_t j = 1; j < n; ++j) {
    const int ij = static_cast<int>(j);
    const double t = t_nodes[j];
    const double self_val = plain ? self.values()[j] : self.unweighted_value(ij);
    const double u_val = problem.u(t, self_val);
    if (!std::isfinite(u_val) || u_val == 0.0) {
      throw DegenerateMultiplier(
          "picard_step_ivp: multiplier u is zero or non-finite at a mesh node",
          t);
    }
    const double w_val = problem.w(t, self_val);
    if (!std::isfinite(w_val)) {
      throw EvalError("hybrid offset w returned a non-finite value at t=" +
                      std::to_string(t));
    }
    const double wgt = plain ? 1.0 : std::pow(self.tau(ij), 1.0 - xi);
    out[j] = u_val * (c + wgt * integral_term.values()[j]) + wgt * w_val;
  }
  return WeightedGridFunction(mesh, self.psi_ptr(), xi, std::move(out));
}

}  // namespace detail

/// One undamped Picard sweep of the coupled pair: returns (y_next, x_next),
/// each produced from its own nonlinearity and the other component's
/// forcing.  Both outputs satisfy the weighted initial condition exactly.
///
/// Builds the quadrature operator afresh; for repeated sweeps on one mesh
/// prefer solve_coupled_ivp, which amortises the O(N^2) weight table.
inline std::pair<WeightedGridFunction, WeightedGridFunction> picard_step_ivp(
    const HybridIvpProblem& problem, const WeightedGridFunction& y,
    const WeightedGridFunction& x) {
  detail::validate_ivp_problem(problem);
  detail::require_iterate_pair(problem, y, x);
  const FracIntegralOperator integral(problem.psi, y.mesh_ptr(),
                                      problem.order.mu());
  return {detail::ivp_half_step(problem, integral, y, x),
          detail::ivp_half_step(problem, integral, x, y)};
}

/// Distance of a pair from being a fixed point of the Picard map: the
/// weighted max-norm difference between each component and its image under
/// one undamped sweep.  A solver-independent quality certificate -- small
/// residuals mean the pair nearly solves the discretised integral equations,
/// whatever produced it.
inline std::pair<double, double> residual_ivp(const HybridIvpProblem& problem,
                                              const WeightedGridFunction& y,
                                              const WeightedGridFunction& x) {
  const auto step = picard_step_ivp(problem, y, x);
  return {max_abs_diff(y, step.first), max_abs_diff(x, step.second)};
}

/// Runs the damped Picard iteration to a fixed point of the coupled
/// integral equations.
///
/// Starts from config.initial_guess when present (it must live on
/// config.mesh with the problem's Psi and weight exponent), otherwise from
/// the weighted-constant pair z == y0.  Iterates
/// next = (1 - relaxation) * current + relaxation * sweep(current) until the
/// summed update distance drops below tol * max(1, pair norm) or max_iter is
/// reached.  Non-convergence is reported through the result, not thrown.
inline SolutionPair solve_coupled_ivp(const HybridIvpProblem& problem,
                                      const SolverConfig& config) {
  detail::validate_ivp_problem(problem);
  detail::validate_solver_config(config);

  const double xi = problem.order.xi();
  WeightedGridFunction y = config.initial_guess
                               ? config.initial_guess->first
                               : WeightedGridFunction::sample_weighted(
                                     config.mesh, problem.psi, xi,
                                     [&](double) { return problem.y0; });
  WeightedGridFunction x =
      config.initial_guess ? config.initial_guess->second : y;
  detail::require_iterate_pair(problem, y, x);
  if (y.mesh_ptr().get() != config.mesh.get() &&
      !same_mesh(y.mesh(), *config.mesh)) {
    throw InvalidArgument(
        "solve_coupled_ivp: initial guess does not live on config.mesh");
  }

  const FracIntegralOperator integral(problem.psi, y.mesh_ptr(),
                                      problem.order.mu());
  const auto sweep = [&](const WeightedGridFunction& cy,
                         const WeightedGridFunction& cx) {
    return std::make_pair(detail::ivp_half_step(problem, integral, cy, cx),
                          detail::ivp_half_step(problem, integral, cx, cy));
  };
  SolutionPair result =
      detail::damped_fixed_point(sweep, std::move(y), std::move(x), config);
  const auto final_step = sweep(result.y, result.x);
  result.residual_y = max_abs_diff(result.y, final_step.first);
  result.residual_x = max_abs_diff(result.x, final_step.second);
  return result;
}

}  // namespace psihilfer
