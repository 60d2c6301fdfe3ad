#pragma once
/// Sufficient smallness conditions under which the coupled hybrid
/// integral-equation maps admit a solution pair, evaluated from
/// user-supplied hypothesis scalars, plus sampling heuristics that help a
/// user fill in those scalars when no analytic constant is at hand.
///
/// The conditions deliberately take pre-digested numbers (Lipschitz
/// constants, bound norms, |Omega| values) rather than function objects:
/// the hypotheses are analytic facts the caller asserts.  The estimators
/// below are labelled heuristics -- they sample finitely many points, so
/// they produce lower bounds and are never fed automatically into a
/// "condition satisfied" verdict.
///
/// A report with `satisfied == false` means the test is inconclusive, not
/// that no solution exists: the underlying conditions are sufficient only.

#include <psihilfer/errors.hpp>
#include <psihilfer/frac_order.hpp>
#include <psihilfer/psi_function.hpp>
#include <psihilfer/special_functions.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace psihilfer {

/// Hypothesis scalars for the coupled initial-value system.
///
/// `sigma` and `delta` are Lipschitz constants of the multiplier u and the
/// offset w in their state arguments, uniformly in t.  `g_norm` is the
/// weighted-norm bound on the forcing v, i.e. a constant g with
/// |v(t, p, q)| <= (Psi(t) - Psi(0))^{1-xi} g.  For a t-dependent bound
/// sample g on a grid and pass `weighted_norm(...)` of the weighted samples.
/// `y0_over_u0` is the value |y0 / u(0, y(0+))|.  The optional strict sup
/// bounds `u_sup` (|u| < K1) and `w_sup` (|w| < K2) feed only the radius
/// diagnostic.
struct IvpHypothesisData {
  double sigma = 0.0;
  double delta = 0.0;
  double g_norm = 0.0;
  double y0_over_u0 = 0.0;
  FracOrder order;
  PsiPtr psi;
  double T = 1.0;
  std::optional<double> u_sup;
  std::optional<double> w_sup;
};

/// Hypothesis scalars for the coupled two-point boundary-value system.
///
/// Indices follow the two equations: `sigma_i`/`delta_i` are the Lipschitz
/// constants of u_i and w_i, `g*_norm` the weighted bound norms on v_i, and
/// `omega*_abs` the |Omega_i| magnitudes of the boundary constants.  The
/// optional strict sup bounds `u*_sup` (|u_i| < M_i) and `w*_sup`
/// (|w_i| < N_i) feed only the radius diagnostic.
struct BvpHypothesisData {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double g1_norm = 0.0;
  double g2_norm = 0.0;
  double omega1_abs = 0.0;
  double omega2_abs = 0.0;
  FracOrder order;
  PsiPtr psi;
  double T = 1.0;
  std::optional<double> u1_sup;
  std::optional<double> u2_sup;
  std::optional<double> w1_sup;
  std::optional<double> w2_sup;
};

/// One named contribution to a condition's left-hand side.
struct ExistenceAddend {
  std::string name;
  double value = 0.0;
};

/// Outcome of evaluating a smallness condition.  `satisfied` holds exactly
/// when `lhs < 1`, equivalently `margin > 0`; `breakdown` lists the named
/// addends whose sum is `lhs`.
struct ExistenceReport {
  double lhs = 0.0;
  double margin = 1.0;
  bool satisfied = true;
  std::vector<ExistenceAddend> breakdown;
};

namespace detail {

inline void require_nonnegative(double value, const char* name) {
  if (!(value >= 0.0)) {
    std::ostringstream msg;
    msg << "existence check: " << name << " must be nonnegative, got " << value;
    throw InvalidArgument(msg.str());
  }
}

inline void require_domain(const PsiPtr& psi, double T) {
  if (!psi) throw InvalidArgument("existence check: psi must be non-null");
  if (!(T > 0.0)) {
    throw InvalidArgument("existence check: horizon T must be positive");
  }
}

/// (Psi(T) - Psi(0))^{mu + 1 - xi} / Gamma(mu + 1): the gain the fractional
/// integral contributes to the condition over the full horizon.
inline double kernel_gain(const FracOrder& order, const PsiFunction& psi,
                          double T) {
  const double span = psi.value(T) - psi.value(0.0);
  return std::pow(span, order.mu() + 1.0 - order.xi()) /
         gamma_fn(order.mu() + 1.0);
}

inline ExistenceReport assemble_report(std::vector<ExistenceAddend> addends) {
  ExistenceReport report;
  report.breakdown = std::move(addends);
  report.lhs = 0.0;
  for (const auto& addend : report.breakdown) report.lhs += addend.value;
  report.margin = 1.0 - report.lhs;
  report.satisfied = report.lhs < 1.0;
  return report;
}

}  // namespace detail

/// Evaluates the initial-value smallness condition
///
///   4 sigma [ y0_over_u0 + (Psi(T)-Psi(0))^{mu+1-xi}/Gamma(mu+1) g_norm ]
///     + delta < 1.
///
/// Throws InvalidArgument on negative scalars, a null psi, or T <= 0.
inline ExistenceReport check_ivp_condition(const IvpHypothesisData& data) {
  detail::require_nonnegative(data.sigma, "sigma");
  detail::require_nonnegative(data.delta, "delta");
  detail::require_nonnegative(data.g_norm, "g_norm");
  detail::require_nonnegative(data.y0_over_u0, "y0_over_u0");
  detail::require_domain(data.psi, data.T);

  const double gain = detail::kernel_gain(data.order, *data.psi, data.T);
  return detail::assemble_report({
      {"initial_term", 4.0 * data.sigma * data.y0_over_u0},
      {"forcing_term", 4.0 * data.sigma * gain * data.g_norm},
      {"offset_term", data.delta},
  });
}

/// Evaluates the boundary-value smallness condition
///
///   (sigma1+sigma2) [ |Omega1|+|Omega2|
///       + (Psi(T)-Psi(0))^{mu+1-xi}/Gamma(mu+1) (g1_norm+g2_norm) ]
///     + (delta1+delta2) < 1.
///
/// Throws InvalidArgument on negative scalars, a null psi, or T <= 0.
inline ExistenceReport check_bvp_condition(const BvpHypothesisData& data) {
  detail::require_nonnegative(data.sigma1, "sigma1");
  detail::require_nonnegative(data.sigma2, "sigma2");
  detail::require_nonnegative(data.delta1, "delta1");
  detail::require_nonnegative(data.delta2, "delta2");
  detail::require_nonnegative(data.g1_norm, "g1_norm");
  detail::require_nonnegative(data.g2_norm, "g2_norm");
  detail::require_nonnegative(data.omega1_abs, "omega1_abs");
  detail::require_nonnegative(data.omega2_abs, "omega2_abs");
  detail::require_domain(data.psi, data.T);

  const double sigma_sum = data.sigma1 + data.sigma2;
  const double gain = detail::kernel_gain(data.order, *data.psi, data.T);
  return detail::assemble_report({
      {"boundary_term", sigma_sum * (data.omega1_abs + data.omega2_abs)},
      {"forcing_term", sigma_sum * gain * (data.g1_norm + data.g2_norm)},
      {"offset_term", data.delta1 + data.delta2},
  });
}

/// Diagnostic radius of the solution ball used by the initial-value
/// existence argument:
///
///   R = K1 [ y0_over_u0 + gain * g_norm ] + K2 (Psi(T)-Psi(0))^{1-xi},
///
/// where K1 = u_sup and K2 = w_sup.  Returns nullopt when either sup bound
/// is absent; the value is purely informational and never feeds a solver.
inline std::optional<double> compute_radius_ivp(const IvpHypothesisData& data) {
  if (!data.u_sup || !data.w_sup) return std::nullopt;
  detail::require_domain(data.psi, data.T);
  if (!(*data.u_sup > 0.0) || !(*data.w_sup > 0.0)) {
    throw InvalidArgument("compute_radius_ivp: sup bounds must be positive");
  }
  const double gain = detail::kernel_gain(data.order, *data.psi, data.T);
  const double span = data.psi->value(data.T) - data.psi->value(0.0);
  return *data.u_sup * (data.y0_over_u0 + gain * data.g_norm) +
         *data.w_sup * std::pow(span, 1.0 - data.order.xi());
}

/// Diagnostic radius of the solution ball used by the boundary-value
/// existence argument:
///
///   R* = M1 |Omega1| + M2 |Omega2| + (Psi(T)-Psi(0))^{1-xi} (N1 + N2)
///          + gain * (M1 g1_norm + M2 g2_norm),
///
/// with M_i = u*_sup and N_i = w*_sup.  Returns nullopt when any of the
/// four sup bounds is absent.
inline std::optional<double> compute_radius_bvp(const BvpHypothesisData& data) {
  if (!data.u1_sup || !data.u2_sup || !data.w1_sup || !data.w2_sup) {
    return std::nullopt;
  }
  detail::require_domain(data.psi, data.T);
  for (double bound : {*data.u1_sup, *data.u2_sup, *data.w1_sup, *data.w2_sup}) {
    if (!(bound > 0.0)) {
      throw InvalidArgument("compute_radius_bvp: sup bounds must be positive");
    }
  }
  const double gain = detail::kernel_gain(data.order, *data.psi, data.T);
  const double span = data.psi->value(data.T) - data.psi->value(0.0);
  return *data.u1_sup * data.omega1_abs + *data.u2_sup * data.omega2_abs +
         std::pow(span, 1.0 - data.order.xi()) * (*data.w1_sup + *data.w2_sup) +
         gain * (*data.u1_sup * data.g1_norm + *data.u2_sup * data.g2_norm);
}

namespace detail {

/// Stratified sample coordinates: a random permutation of the `samples`
/// cell centers of [lo, hi].  Combining one permutation per dimension
/// yields a Latin-hypercube design.
inline std::vector<double> latin_axis(double lo, double hi, int samples,
                                      std::mt19937_64& rng) {
  std::vector<int> cells(static_cast<std::size_t>(samples));
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);
  std::vector<double> coords(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    coords[k] = lo + (cells[k] + 0.5) / samples * (hi - lo);
  }
  return coords;
}

inline void require_samples(int samples) {
  if (samples < 2) {
    throw InvalidArgument("sampling estimator: samples must be at least 2");
  }
}

inline void require_range(const std::pair<double, double>& range,
                          const char* name, bool allow_degenerate) {
  if (!std::isfinite(range.first) || !std::isfinite(range.second) ||
      range.second < range.first ||
      (!allow_degenerate && range.second == range.first)) {
    std::ostringstream msg;
    msg << "sampling estimator: invalid " << name << " range [" << range.first
        << ", " << range.second << "]";
    throw InvalidArgument(msg.str());
  }
}

[[noreturn]] inline void throw_nonfinite(double t,
                                         const std::vector<double>& args) {
  std::ostringstream msg;
  msg << "sampling estimator: function not finite at t=" << t;
  for (std::size_t d = 0; d < args.size(); ++d) {
    msg << ", arg" << d + 1 << "=" << args[d];
  }
  throw EvalError(msg.str());
}

}  // namespace detail

/// Sampled lower bound on the Lipschitz constant of f(t, args) in its state
/// arguments, uniformly in t: the maximum over Latin-hypercube pairs
/// (same t, two independent state points p, q) of
///
///   |f(t, p) - f(t, q)| / sum_d |p_d - q_d|.
///
/// Deterministic for a fixed seed.  This is a heuristic lower bound, never
/// a certificate; pairs with coinciding state points are skipped.  Throws
/// EvalError (with the offending point) if f is not finite on a sample.
inline double estimate_lipschitz(
    const std::function<double(double, const std::vector<double>&)>& f,
    std::pair<double, double> t_range,
    const std::vector<std::pair<double, double>>& arg_ranges, int samples = 256,
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL) {
  detail::require_samples(samples);
  detail::require_range(t_range, "t", /*allow_degenerate=*/true);
  if (arg_ranges.empty()) {
    throw InvalidArgument("estimate_lipschitz: at least one state range required");
  }
  for (const auto& range : arg_ranges) {
    detail::require_range(range, "state", /*allow_degenerate=*/false);
  }

  std::mt19937_64 rng(seed);
  const auto t_coords =
      detail::latin_axis(t_range.first, t_range.second, samples, rng);
  std::vector<std::vector<double>> first_coords;
  std::vector<std::vector<double>> second_coords;
  for (const auto& range : arg_ranges) {
    first_coords.push_back(
        detail::latin_axis(range.first, range.second, samples, rng));
    second_coords.push_back(
        detail::latin_axis(range.first, range.second, samples, rng));
  }

  double best = 0.0;
  std::vector<double> p(arg_ranges.size());
  std::vector<double> q(arg_ranges.size());
  for (int k = 0; k < samples; ++k) {
    double denom = 0.0;
    for (std::size_t d = 0; d < arg_ranges.size(); ++d) {
      p[d] = first_coords[d][static_cast<std::size_t>(k)];
      q[d] = second_coords[d][static_cast<std::size_t>(k)];
      denom += std::fabs(p[d] - q[d]);
    }
    const double t = t_coords[static_cast<std::size_t>(k)];
    const double fp = f(t, p);
    if (!std::isfinite(fp)) detail::throw_nonfinite(t, p);
    const double fq = f(t, q);
    if (!std::isfinite(fq)) detail::throw_nonfinite(t, q);
    if (denom > 0.0) best = std::max(best, std::fabs(fp - fq) / denom);
  }
  return best;
}

/// Sampled estimate of the weighted bound norm of a forcing v(t, p, q):
/// the maximum over Latin-hypercube samples of
///
///   |v(t, p, q)| / (Psi(t) - Psi(0))^{1-xi},
///
/// which for xi = 1 is simply the sampled maximum of |v|.  t is sampled in
/// cell centers of (0, T], so the weight is evaluated only at positive
/// times; samples whose weight underflows are skipped.  A heuristic lower
/// bound, deterministic per seed.  Throws EvalError if v is not finite on
/// a sample.
inline double estimate_bound_g(
    const std::function<double(double, double, double)>& v,
    const FracOrder& order, const PsiPtr& psi, double T,
    std::pair<double, double> p_range, std::pair<double, double> q_range,
    int samples = 256, std::uint64_t seed = 0x9e3779b97f4a7c15ULL) {
  detail::require_samples(samples);
  detail::require_domain(psi, T);
  detail::require_range(p_range, "p", /*allow_degenerate=*/false);
  detail::require_range(q_range, "q", /*allow_degenerate=*/false);

  std::mt19937_64 rng(seed);
  const auto t_coords = detail::latin_axis(0.0, T, samples, rng);
  const auto p_coords =
      detail::latin_axis(p_range.first, p_range.second, samples, rng);
  const auto q_coords =
      detail::latin_axis(q_range.first, q_range.second, samples, rng);

  const double psi0 = psi->value(0.0);
  double best = 0.0;
  for (int k = 0; k < samples; ++k) {
    const std::size_t index = static_cast<std::size_t>(k);
    const double t = t_coords[index];
    const double p = p_coords[index];
    const double q = q_coords[index];
    const double value = v(t, p, q);
    if (!std::isfinite(value)) detail::throw_nonfinite(t, {p, q});
    const double weight =
        std::pow(psi->value(t) - psi0, 1.0 - order.xi());
    if (weight < 1e-300) continue;
    best = std::max(best, std::fabs(value) / weight);
  }
  return best;
}

}  // namespace psihilfer
