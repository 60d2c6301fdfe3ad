#pragma once

/// Graded meshes t_j = T (j/N)^r clustering nodes at t = 0, where the
/// kernel and solution singularities live.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "psihilfer/errors.hpp"

namespace psihilfer {

/// An ordered node set 0 = t_0 < t_1 < ... < t_N = T following the graded
/// law t_j = T (j/N)^r.  Immutable after construction.
class GradedMesh {
 public:
  GradedMesh(double T, int N, double r) : T_(T), N_(N), r_(r) {
    if (!(T > 0.0)) {
      throw InvalidArgument("GradedMesh: T must be positive, got " +
                            std::to_string(T));
    }
    if (N < 2) {
      throw InvalidArgument("GradedMesh: need at least 2 segments, got " +
                            std::to_string(N));
    }
    if (!(r >= 1.0)) {
      throw InvalidArgument("GradedMesh: grading exponent must be >= 1, got " +
                            std::to_string(r));
    }
    nodes_.resize(static_cast<std::size_t>(N) + 1);
    nodes_[0] = 0.0;
    for (int j = 1; j < N; ++j) {
      nodes_[static_cast<std::size_t>(j)] =
          T * std::pow(static_cast<double>(j) / N, r);
    }
    nodes_[static_cast<std::size_t>(N)] = T;  // exact endpoint, no pow roundoff
  }

  double T() const noexcept { return T_; }
  int segments() const noexcept { return N_; }
  double grading() const noexcept { return r_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  double node(int j) const { return nodes_.at(static_cast<std::size_t>(j)); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }

 private:
  double T_;
  int N_;
  double r_;
  std::vector<double> nodes_;
};

using MeshPtr = std::shared_ptr<const GradedMesh>;

/// Build a graded mesh; r = 1 gives the uniform mesh.
inline GradedMesh make_graded_mesh(double T, int N, double r) {
  return GradedMesh(T, N, r);
}

inline MeshPtr make_mesh(double T, int N, double r) {
  return std::make_shared<const GradedMesh>(T, N, r);
}

/// Default grading exponent resolving the (Psi(t)-Psi(0))^(xi-1) endpoint
/// singularity to second order under piecewise-linear product integration.
inline double default_grading(double xi) {
  if (!(xi > 0.0 && xi <= 1.0)) {
    throw InvalidArgument("default_grading: xi must lie in (0,1]");
  }
  return std::max(1.0, 2.0 / xi);
}

/// True when two meshes describe the same node set (shared instance or
/// identical parameters; the graded law makes parameters decisive).
inline bool same_mesh(const GradedMesh& a, const GradedMesh& b) {
  if (&a == &b) return true;
  return a.T() == b.T() && a.segments() == b.segments() &&
         a.grading() == b.grading();
}

}  // namespace psihilfer
