#pragma once

/// Strictly increasing C^1 substitution functions Psi with Psi'(t) > 0.
///
/// Every operator in the library is parameterized by such a function.  The
/// built-in kinds (identity, log-shift, power, exponential) carry analytic
/// derivatives and inverses; custom functions supply their own callables and
/// may fall back to bracketed bisection for the inverse.

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "psihilfer/errors.hpp"

namespace psihilfer {

enum class PsiKind { identity, log_shift, power, exponential, custom };

inline const char* to_string(PsiKind kind) {
  switch (kind) {
    case PsiKind::identity: return "identity";
    case PsiKind::log_shift: return "log_shift";
    case PsiKind::power: return "power";
    case PsiKind::exponential: return "exponential";
    case PsiKind::custom: return "custom";
  }
  return "unknown";
}

/// An increasing C^1 function Psi together with its derivative and inverse.
/// Instances are immutable after construction and safe to share.
class PsiFunction {
 public:
  using Callable = std::function<double(double)>;

  /// Psi(t) = t.
  static PsiFunction identity() {
    return PsiFunction(PsiKind::identity, "identity",
                       [](double t) { return t; },
                       [](double) { return 1.0; },
                       [](double v) { return v; });
  }

  /// Psi(t) = ln(t + c) with c > 0 so the function is finite and increasing
  /// on [0, T].
  static PsiFunction log_shift(double c) {
    if (!(c > 0.0)) {
      throw InvalidArgument("PsiFunction::log_shift: shift must be positive");
    }
    return PsiFunction(PsiKind::log_shift,
                       "log_shift(c=" + std::to_string(c) + ")",
                       [c](double t) { return std::log(t + c); },
                       [c](double t) { return 1.0 / (t + c); },
                       [c](double v) { return std::exp(v) - c; });
  }

  /// Psi(t) = (t + c)^p with c > 0 and p > 0 (increasing, C^1 on [0, T]).
  static PsiFunction power(double c, double p) {
    if (!(c > 0.0)) {
      throw InvalidArgument("PsiFunction::power: shift must be positive");
    }
    if (!(p > 0.0)) {
      throw InvalidArgument("PsiFunction::power: exponent must be positive");
    }
    return PsiFunction(
        PsiKind::power,
        "power(c=" + std::to_string(c) + ",p=" + std::to_string(p) + ")",
        [c, p](double t) { return std::pow(t + c, p); },
        [c, p](double t) { return p * std::pow(t + c, p - 1.0); },
        [c, p](double v) { return std::pow(v, 1.0 / p) - c; });
  }

  /// Psi(t) = exp(lambda t) with lambda > 0.
  static PsiFunction exponential(double lambda) {
    if (!(lambda > 0.0)) {
      throw InvalidArgument("PsiFunction::exponential: rate must be positive");
    }
    return PsiFunction(PsiKind::exponential,
                       "exponential(lambda=" + std::to_string(lambda) + ")",
                       [lambda](double t) { return std::exp(lambda * t); },
                       [lambda](double t) { return lambda * std::exp(lambda * t); },
                       [lambda](double v) { return std::log(v) / lambda; });
  }

  /// Custom function with a user-supplied analytic inverse.
  static PsiFunction custom(Callable eval, Callable deriv, Callable inverse,
                            std::string label = "custom") {
    require_callable(eval, "eval");
    require_callable(deriv, "deriv");
    require_callable(inverse, "inverse");
    return PsiFunction(PsiKind::custom, std::move(label), std::move(eval),
                       std::move(deriv), std::move(inverse));
  }

  /// Custom function without an analytic inverse: the inverse is computed by
  /// bracketed bisection on [0, t_max] to absolute tolerance 1e-14
  /// (monotonicity guarantees correctness).
  static PsiFunction custom_bisected(Callable eval, Callable deriv,
                                     double t_max,
                                     std::string label = "custom") {
    require_callable(eval, "eval");
    require_callable(deriv, "deriv");
    if (!(t_max > 0.0)) {
      throw InvalidArgument("PsiFunction::custom_bisected: t_max must be > 0");
    }
    Callable ev = eval;  // captured copy for the inverse closure
    Callable inverse = [ev, t_max](double v) {
      double lo = 0.0;
      double hi = t_max;
      if (v <= ev(lo)) return lo;
      if (v >= ev(hi)) return hi;
      while (hi - lo > 1e-14 * std::max(1.0, std::fabs(hi))) {
        const double mid = 0.5 * (lo + hi);
        (ev(mid) < v ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    return PsiFunction(PsiKind::custom, std::move(label), std::move(eval),
                       std::move(deriv), std::move(inverse));
  }

  double operator()(double t) const { return eval_(t); }
  double value(double t) const { return eval_(t); }
  double deriv(double t) const { return deriv_(t); }
  double inverse(double v) const { return inverse_(v); }

  PsiKind kind() const noexcept { return kind_; }
  const std::string& describe() const noexcept { return label_; }

  /// Sampled invariant validation on [0, T]: strict monotonicity, positive
  /// derivative, derivative consistency against a central finite difference
  /// (relative 1e-6), and inverse round-trip (1e-12 absolute-relative mix).
  /// Throws InvalidArgument on the first violated invariant.
  void validate_on(double T, int sample_count = 64) const {
    if (!(T > 0.0)) {
      throw InvalidArgument("PsiFunction::validate_on: T must be positive");
    }
    if (sample_count < 2) {
      throw InvalidArgument("PsiFunction::validate_on: need >= 2 samples");
    }
    double prev_t = 0.0;
    double prev_v = eval_(0.0);
    for (int i = 0; i <= sample_count; ++i) {
      const double t = T * static_cast<double>(i) / sample_count;
      const double v = eval_(t);
      if (i > 0 && !(v > prev_v)) {
        throw InvalidArgument("PsiFunction: not strictly increasing between t=" +
                              std::to_string(prev_t) + " and t=" +
                              std::to_string(t));
      }
      if (!(deriv_(t) > 0.0)) {
        throw InvalidArgument("PsiFunction: derivative not positive at t=" +
                              std::to_string(t));
      }
      const double rt = inverse_(v);
      if (std::fabs(rt - t) > 1e-12 * std::max(1.0, std::fabs(t))) {
        throw InvalidArgument("PsiFunction: inverse round-trip failed at t=" +
                              std::to_string(t));
      }
      if (i > 0 && i < sample_count) {
        const double h = 1e-6 * std::max(1.0, std::fabs(t));
        const double fd = (eval_(t + h) - eval_(t - h)) / (2.0 * h);
        const double d = deriv_(t);
        if (std::fabs(fd - d) > 1e-6 * std::max(1.0, std::fabs(d))) {
          throw InvalidArgument(
              "PsiFunction: derivative inconsistent with finite difference "
              "at t=" + std::to_string(t));
        }
      }
      prev_t = t;
      prev_v = v;
    }
  }

 private:
  PsiFunction(PsiKind kind, std::string label, Callable eval, Callable deriv,
              Callable inverse)
      : kind_(kind),
        label_(std::move(label)),
        eval_(std::move(eval)),
        deriv_(std::move(deriv)),
        inverse_(std::move(inverse)) {}

  static void require_callable(const Callable& c, const char* name) {
    if (!c) {
      throw InvalidArgument(std::string("PsiFunction: missing callable: ") +
                            name);
    }
  }

  PsiKind kind_;
  std::string label_;
  Callable eval_;
  Callable deriv_;
  Callable inverse_;
};

using PsiPtr = std::shared_ptr<const PsiFunction>;

/// Convenience: wrap a PsiFunction for shared, immutable use.
inline PsiPtr make_psi(PsiFunction psi) {
  return std::make_shared<const PsiFunction>(std::move(psi));
}

}  // namespace psihilfer
