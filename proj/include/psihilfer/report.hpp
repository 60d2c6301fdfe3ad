#pragma once

/// Run reporting: the solution CSV, the line-oriented `key: value` report,
/// and the convergence-study CSV.  All formats are stable interfaces locked
/// by golden-file tests.
///
/// Solution CSV schema (one row per mesh node):
///
///   t,psi_t,weight,z_y,y,z_x,x
///
/// where weight = (Psi(t) - Psi(0))^(1-xi), z = weight * y is the stored
/// weighted value, and the plain-value columns y, x are left empty at t = 0
/// when xi < 1 (the plain value does not exist there; the weight removes an
/// actual singularity).
///
/// Convergence CSV schema (one row per (mu, N) pair):
///
///   mu,N,max_rel_err,estimated_order
///
/// estimated_order is empty on each mu's first row (no coarser N to compare
/// against) and otherwise log2(err_coarse / err_fine) / log2(N_fine /
/// N_coarse).

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "psihilfer/config.hpp"
#include "psihilfer/errors.hpp"
#include "psihilfer/existence.hpp"
#include "psihilfer/grid_function.hpp"

namespace psihilfer {

/// Everything one solver run reports.  Optional fields apply to one problem
/// kind only; a report is emitted even when the run did not converge.
struct RunReport {
  std::string source;  ///< registry name or config-file path
  ProblemKind kind = ProblemKind::ivp;
  double mu = 0.0;
  double nu = 0.0;
  double xi = 0.0;
  double T = 0.0;
  std::string psi;
  double y0 = 0.0;
  std::optional<double> k;  ///< ivp coupling gain
  std::optional<double> a;  ///< bvp boundary weights
  std::optional<double> b;
  int segments = 0;
  double grading = 1.0;
  double tol = 0.0;
  int max_iter = 0;
  double relaxation = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_update_norm = 0.0;
  double residual_y = 0.0;
  double residual_x = 0.0;
  std::optional<double> omega1, omega2;          ///< bvp constants
  std::optional<double> denominator1, denominator2;
  std::optional<double> defect_y, defect_x;      ///< bvp boundary defects
  std::optional<ExistenceReport> existence;      ///< when hypothesis present
  std::string solution_csv;  ///< path of the written CSV, empty if none
};

namespace report_detail {

/// Repr-faithful number formatting shared by all emitters.
inline std::ostream& full(std::ostream& out) {
  return out << std::setprecision(17);
}

}  // namespace report_detail

/// Write the solution CSV for a solved pair.  Both components must live on
/// the same mesh with the same weight exponent.
inline void write_solution_csv(std::ostream& out,
                               const WeightedGridFunction& y,
                               const WeightedGridFunction& x) {
  if (!same_mesh(y.mesh(), x.mesh()) || y.xi() != x.xi()) {
    throw InvalidArgument(
        "write_solution_csv: components live on different grids or weights");
  }
  report_detail::full(out);
  out << "t,psi_t,weight,z_y,y,z_x,x\n";
  const bool plain = y.xi() == 1.0;
  for (int j = 0; j < static_cast<int>(y.size()); ++j) {
    const double t = y.mesh().node(j);
    const double tau = y.tau(j);
    const double weight = plain ? 1.0 : std::pow(tau, 1.0 - y.xi());
    out << t << ',' << y.psi().value(t) << ',' << weight << ',' << y.value(j)
        << ',';
    if (j == 0 && !plain) {
      // The plain-value columns stay empty at the singular node.
      out << ',' << x.value(j) << ",\n";
      continue;
    }
    out << y.unweighted_value(j) << ',' << x.value(j) << ','
        << x.unweighted_value(j) << "\n";
  }
}

/// Append the existence-report lines shared by solve and check output.
inline void write_existence_lines(std::ostream& out,
                                  const ExistenceReport& report) {
  report_detail::full(out);
  out << "existence_lhs: " << report.lhs << "\n";
  out << "existence_margin: " << report.margin << "\n";
  out << "existence_satisfied: " << (report.satisfied ? "yes" : "no") << "\n";
  for (const auto& addend : report.breakdown) {
    out << "existence_term_" << addend.name << ": " << addend.value << "\n";
  }
}

/// Write the full `key: value` run report.
inline void write_report(std::ostream& out, const RunReport& report) {
  report_detail::full(out);
  out << "source: " << report.source << "\n";
  out << "kind: " << to_string(report.kind) << "\n";
  out << "mu: " << report.mu << "\n";
  out << "nu: " << report.nu << "\n";
  out << "xi: " << report.xi << "\n";
  out << "T: " << report.T << "\n";
  out << "psi: " << report.psi << "\n";
  out << "y0: " << report.y0 << "\n";
  if (report.k) out << "k: " << *report.k << "\n";
  if (report.a) out << "a: " << *report.a << "\n";
  if (report.b) out << "b: " << *report.b << "\n";
  out << "N: " << report.segments << "\n";
  out << "grading: " << report.grading << "\n";
  out << "tol: " << report.tol << "\n";
  out << "max_iter: " << report.max_iter << "\n";
  out << "relaxation: " << report.relaxation << "\n";
  out << "converged: " << (report.converged ? "yes" : "no") << "\n";
  out << "iterations: " << report.iterations << "\n";
  out << "final_update_norm: " << report.final_update_norm << "\n";
  out << "residual_y: " << report.residual_y << "\n";
  out << "residual_x: " << report.residual_x << "\n";
  if (report.omega1) out << "omega1: " << *report.omega1 << "\n";
  if (report.omega2) out << "omega2: " << *report.omega2 << "\n";
  if (report.denominator1) {
    out << "denominator1: " << *report.denominator1 << "\n";
  }
  if (report.denominator2) {
    out << "denominator2: " << *report.denominator2 << "\n";
  }
  if (report.defect_y) out << "defect_y: " << *report.defect_y << "\n";
  if (report.defect_x) out << "defect_x: " << *report.defect_x << "\n";
  if (report.existence) write_existence_lines(out, *report.existence);
  if (!report.solution_csv.empty()) {
    out << "solution_csv: " << report.solution_csv << "\n";
  }
}

/// One measured point of the quadrature convergence study.
struct ConvergenceRow {
  double mu = 0.0;
  int segments = 0;
  double max_rel_err = 0.0;
  std::optional<double> estimated_order;
};

/// Write the convergence-study CSV.
inline void write_convergence_csv(std::ostream& out,
                                  const std::vector<ConvergenceRow>& rows) {
  report_detail::full(out);
  out << "mu,N,max_rel_err,estimated_order\n";
  for (const auto& row : rows) {
    out << row.mu << ',' << row.segments << ',' << row.max_rel_err << ',';
    if (row.estimated_order) out << *row.estimated_order;
    out << "\n";
  }
}

}  // namespace psihilfer
