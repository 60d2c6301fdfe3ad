#pragma once

/// Weighted grid functions: the finite representation of possibly singular
/// functions y on a graded mesh.
///
/// A function y that behaves like (Psi(t)-Psi(0))^(xi-1) near t = 0 is stored
/// through its weighted values z_j = (Psi(t_j)-Psi(0))^(1-xi) y(t_j), which
/// stay finite at every node including t = 0.  The discrete weighted norm is
/// then a plain max over |z_j|.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "psihilfer/errors.hpp"
#include "psihilfer/mesh.hpp"
#include "psihilfer/psi_function.hpp"

namespace psihilfer {

/// Values z_j = (Psi(t_j)-Psi(0))^(1-xi) y(t_j) on a graded mesh, together
/// with the exponent xi in (0,1] they were weighted with.  xi = 1 means the
/// values are plain samples of y.  Immutable after construction.
class WeightedGridFunction {
 public:
  WeightedGridFunction(MeshPtr mesh, PsiPtr psi, double xi,
                       std::vector<double> values)
      : mesh_(std::move(mesh)),
        psi_(std::move(psi)),
        xi_(xi),
        values_(std::move(values)) {
    if (!mesh_ || !psi_) {
      throw InvalidArgument("WeightedGridFunction: mesh and psi are required");
    }
    if (!(xi_ > 0.0 && xi_ <= 1.0)) {
      throw InvalidArgument("WeightedGridFunction: xi must lie in (0,1], got " +
                            std::to_string(xi_));
    }
    if (values_.size() != mesh_->node_count()) {
      throw InvalidArgument(
          "WeightedGridFunction: value count " + std::to_string(values_.size()) +
          " does not match mesh node count " +
          std::to_string(mesh_->node_count()));
    }
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (!std::isfinite(values_[j])) {
        throw InvalidArgument(
            "WeightedGridFunction: non-finite value at node " +
            std::to_string(j));
      }
    }
  }

  /// All-zero function with the given weight exponent.
  static WeightedGridFunction zeros(MeshPtr mesh, PsiPtr psi, double xi) {
    std::vector<double> v(mesh ? mesh->node_count() : 0, 0.0);
    return WeightedGridFunction(std::move(mesh), std::move(psi), xi,
                                std::move(v));
  }

  /// Sample a bounded function f directly: xi = 1, values f(t_j).
  static WeightedGridFunction sample_plain(
      MeshPtr mesh, PsiPtr psi, const std::function<double(double)>& f) {
    return sample_weighted(std::move(mesh), std::move(psi), 1.0, f);
  }

  /// Sample weighted values z(t_j) from a callable giving z directly.
  static WeightedGridFunction sample_weighted(
      MeshPtr mesh, PsiPtr psi, double xi,
      const std::function<double(double)>& z) {
    if (!mesh) throw InvalidArgument("sample_weighted: mesh is required");
    std::vector<double> v(mesh->node_count());
    for (std::size_t j = 0; j < v.size(); ++j) {
      v[j] = z(mesh->nodes()[j]);
    }
    return WeightedGridFunction(std::move(mesh), std::move(psi), xi,
                                std::move(v));
  }

  double xi() const noexcept { return xi_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double value(int j) const {
    return values_.at(static_cast<std::size_t>(j));
  }
  std::size_t size() const noexcept { return values_.size(); }

  const GradedMesh& mesh() const noexcept { return *mesh_; }
  const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  const PsiFunction& psi() const noexcept { return *psi_; }
  const PsiPtr& psi_ptr() const noexcept { return psi_; }

  /// tau_j = Psi(t_j) - Psi(0); exactly 0 at node 0.
  double tau(int j) const {
    if (j == 0) return 0.0;
    return psi_->value(mesh_->node(j)) - psi_->value(0.0);
  }

  /// Unweight at node j: y(t_j) = tau_j^(xi-1) z_j.  At node 0 with xi < 1
  /// the plain value does not exist (the weight removes an actual
  /// singularity), so the request is singular.
  double unweighted_value(int j) const {
    if (xi_ == 1.0) return value(j);
    if (j == 0) {
      throw SingularityError(
          "WeightedGridFunction: plain value at t=0 does not exist for xi < 1");
    }
    return std::pow(tau(j), xi_ - 1.0) * value(j);
  }

 private:
  MeshPtr mesh_;
  PsiPtr psi_;
  double xi_;
  std::vector<double> values_;
};

/// Discrete C_{1-xi;Psi} norm: max_j |z_j|.
inline double weighted_norm(const WeightedGridFunction& h) {
  if (h.size() == 0) {
    throw InvalidArgument("weighted_norm: empty grid function");
  }
  double m = 0.0;
  for (double v : h.values()) m = std::max(m, std::fabs(v));
  return m;
}

/// Change the stored weight exponent.  Values are multiplied by
/// tau_j^(xi_old - xi_new).  At node 0 the limit rule applies: moving to a
/// stronger weight (xi_new < xi_old) gives 0; moving to a weaker weight with
/// a nonzero stored limit is singular.
inline WeightedGridFunction reweight(const WeightedGridFunction& h,
                                     double xi_new) {
  if (!(xi_new > 0.0 && xi_new <= 1.0)) {
    throw InvalidArgument("reweight: xi_new must lie in (0,1]");
  }
  if (xi_new == h.xi()) return h;
  std::vector<double> v(h.size());
  if (h.value(0) == 0.0) {
    v[0] = 0.0;
  } else if (xi_new < h.xi()) {
    v[0] = 0.0;
  } else {
    throw SingularityError(
        "reweight: weakening the weight with a nonzero value at t=0 would be "
        "singular");
  }
  const double diff = h.xi() - xi_new;
  for (int j = 1; j < static_cast<int>(h.size()); ++j) {
    v[static_cast<std::size_t>(j)] =
        std::pow(h.tau(j), diff) * h.value(j);
  }
  return WeightedGridFunction(h.mesh_ptr(), h.psi_ptr(), xi_new, std::move(v));
}

/// Convex blend (1-lambda) a + lambda b of two functions on the same mesh
/// with the same weight exponent (the damped Picard update).
inline WeightedGridFunction blend(const WeightedGridFunction& a,
                                  const WeightedGridFunction& b,
                                  double lambda) {
  if (!same_mesh(a.mesh(), b.mesh()) || a.xi() != b.xi()) {
    throw InvalidArgument("blend: operands live on different grids or weights");
  }
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = (1.0 - lambda) * a.values()[j] + lambda * b.values()[j];
  }
  return WeightedGridFunction(a.mesh_ptr(), a.psi_ptr(), a.xi(), std::move(v));
}

/// Max absolute difference of weighted values (same mesh and exponent).
inline double max_abs_diff(const WeightedGridFunction& a,
                           const WeightedGridFunction& b) {
  if (!same_mesh(a.mesh(), b.mesh()) || a.xi() != b.xi()) {
    throw InvalidArgument(
        "max_abs_diff: operands live on different grids or weights");
  }
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    m = std::max(m, std::fabs(a.values()[j] - b.values()[j]));
  }
  return m;
}

}  // namespace psihilfer
