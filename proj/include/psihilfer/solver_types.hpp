#pragma once
/// Shared configuration and result types for the damped Picard solvers.

#include <psihilfer/errors.hpp>
#include <psihilfer/grid_function.hpp>
#include <psihilfer/mesh.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace psihilfer {

/// Knobs of a damped Picard solve.
///
/// `tol` is the weighted-norm update tolerance: the iteration stops once the
/// summed update distance of the pair drops below tol * max(1, pair norm).
/// `relaxation` is the damping factor lambda in
/// next = (1 - lambda) * current + lambda * step(current); 1 means undamped.
/// When `initial_guess` is absent the iteration starts from a
/// weighted-constant pair that satisfies the problem's weight condition from
/// iterate zero: z == y0 for the initial-value solver, z == y0 / (a + b) for
/// the boundary-value solver (z == 0 when a + b == 0).
struct SolverConfig {
  MeshPtr mesh;
  double tol = 1e-10;
  int max_iter = 200;
  double relaxation = 0.5;
  std::optional<std::pair<WeightedGridFunction, WeightedGridFunction>>
      initial_guess;
};

/// A solved (or stalled) coupled pair in weighted representation, with the
/// iteration metadata and the solver-independent residual certificate
/// ||component - one undamped step|| for each component.
///
/// Non-convergence is a reported outcome, not an error: `converged` is false
/// and `final_update_norm` holds the last update distance.
struct SolutionPair {
  WeightedGridFunction y;
  WeightedGridFunction x;
  int iterations = 0;
  bool converged = false;
  double final_update_norm = 0.0;
  double residual_y = 0.0;
  double residual_x = 0.0;
};

namespace detail {

/// Checks that an iterate pair is usable with a given problem: same mesh,
/// the problem's Psi, the problem's weight exponent, and a mesh horizon that
/// matches the problem horizon.  `who` names the calling solver in messages.
inline void require_solver_pair(const PsiPtr& psi, double xi, double T,
                                const WeightedGridFunction& y,
                                const WeightedGridFunction& x,
                                const std::string& who) {
  if (y.mesh_ptr().get() != x.mesh_ptr().get() &&
      !same_mesh(y.mesh(), x.mesh())) {
    throw InvalidArgument(who + ": y and x live on different meshes");
  }
  if (y.psi_ptr().get() != psi.get() || x.psi_ptr().get() != psi.get()) {
    throw InvalidArgument(who +
                          ": iterate does not use the problem's Psi function");
  }
  if (y.xi() != xi || x.xi() != xi) {
    throw InvalidArgument(
        who + ": iterate weight exponent does not match the problem's xi = " +
        std::to_string(xi) + " (construct grids with order.xi())");
  }
  const double t_end = y.mesh().T();
  if (std::fabs(t_end - T) > 1e-12 * std::max(1.0, std::fabs(T))) {
    throw InvalidArgument(who + ": mesh horizon " + std::to_string(t_end) +
                          " does not match problem horizon " +
                          std::to_string(T));
  }
}

inline void validate_solver_config(const SolverConfig& config) {
  if (!config.mesh) {
    throw InvalidArgument("solver config: mesh must be non-null");
  }
  if (!(config.tol > 0.0) || !std::isfinite(config.tol)) {
    throw InvalidArgument("solver config: tol must be positive and finite");
  }
  if (config.max_iter < 1) {
    throw InvalidArgument("solver config: max_iter must be at least 1");
  }
  if (!(config.relaxation > 0.0) || !(config.relaxation <= 1.0)) {
    throw InvalidArgument("solver config: relaxation must lie in (0, 1]");
  }
}

/// Runs the damped fixed-point loop shared by the coupled solvers.
/// `sweep` maps a pair to the undamped next pair.  Returns the final pair
/// with iteration metadata; residuals are filled in by the caller.
template <typename Sweep>
SolutionPair damped_fixed_point(const Sweep& sweep, WeightedGridFunction y,
                                WeightedGridFunction x,
                                const SolverConfig& config) {
  const double lambda = config.relaxation;
  int iterations = 0;
  bool converged = false;
  double update_norm = 0.0;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    auto [step_y, step_x] = sweep(y, x);
    auto next_y = blend(y, step_y, lambda);
    auto next_x = blend(x, step_x, lambda);
    update_norm = max_abs_diff(next_y, y) + max_abs_diff(next_x, x);
    y = std::move(next_y);
    x = std::move(next_x);
    iterations = iter;
    const double scale =
        std::max(1.0, std::max(weighted_norm(y), weighted_norm(x)));
    if (update_norm <= config.tol * scale) {
      converged = true;
      break;
    }
  }
  return SolutionPair{std::move(y), std::move(x), iterations, converged,
                      update_norm, 0.0, 0.0};
}

}  // namespace detail

}  // namespace psihilfer
