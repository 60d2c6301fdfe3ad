#pragma once

/// Fractional-order parameters (mu, nu) and the derived exponent xi.

#include <string>

#include "psihilfer/errors.hpp"

namespace psihilfer {

/// The pair (mu, nu) with mu in (0,1), nu in [0,1].  The composite exponent
/// xi = mu + nu(1-mu) governs boundary weights and admissible endpoint
/// singularities; it is recomputed on demand, never stored.
class FracOrder {
 public:
  FracOrder(double mu, double nu) : mu_(mu), nu_(nu) {
    if (!(mu > 0.0 && mu < 1.0)) {
      throw InvalidArgument("FracOrder: mu must lie in (0,1), got " +
                            std::to_string(mu));
    }
    if (!(nu >= 0.0 && nu <= 1.0)) {
      throw InvalidArgument("FracOrder: nu must lie in [0,1], got " +
                            std::to_string(nu));
    }
  }

  double mu() const noexcept { return mu_; }
  double nu() const noexcept { return nu_; }

  /// xi = mu + nu(1-mu), in (0, 1].  nu == 1 returns exactly 1 so that the
  /// bounded-endpoint case is keyed exactly in floating point.
  double xi() const noexcept {
    return nu_ == 1.0 ? 1.0 : mu_ + nu_ * (1.0 - mu_);
  }

  /// Inner integral order of the derivative composition: (1-nu)(1-mu).
  double inner_order() const noexcept { return (1.0 - nu_) * (1.0 - mu_); }

  /// Outer integral order of the derivative composition: nu(1-mu).
  double outer_order() const noexcept {
    return nu_ == 0.0 ? 0.0 : nu_ * (1.0 - mu_);
  }

 private:
  double mu_;
  double nu_;
};

}  // namespace psihilfer
