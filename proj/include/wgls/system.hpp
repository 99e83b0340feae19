#pragma once

#include "wgls/fields.hpp"
#include "wgls/polymesh.hpp"
#include "wgls/weakcalc.hpp"

#include <Eigen/Sparse>

#include <cstddef>
#include <string>
#include <vector>

namespace wgls {

/// Data of beta . grad u + c u = f in the domain, u = g on the inflow boundary.
struct CoefficientField {
  VectorField beta;
  ScalarField c;
  ScalarField f;
  ScalarField g;

  /// Throws ConfigError naming the first unset field.
  void validate() const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct AssemblyOptions {
  /// Multiplies the h_T^{-1} stabilizer weight.
  double stabilization_weight = 1.0;
  /// Also store the least-squares and stabilizer parts separately.
  bool keep_parts = false;
};

struct LinearSystem {
  SparseMatrix matrix; // a(.,.) + s(.,.) over all dofs
  Eigen::VectorXd rhs; // (f, beta . grad_w v + c v_0)
  SparseMatrix ls_part;         // a(.,.) only, when kept
  SparseMatrix stabilizer_part; // s(.,.) only, when kept

  std::vector<std::size_t> free_dofs;
  std::vector<std::size_t> constrained_dofs;
  Eigen::VectorXd constrained_values;
  SparseMatrix reduced_matrix; // free x free block
  Eigen::VectorXd reduced_rhs; // b_f - A_fc g_c

  [[nodiscard]] std::size_t n_dofs() const { return static_cast<std::size_t>(rhs.size()); }
  [[nodiscard]] std::size_t n_free() const { return free_dofs.size(); }
  /// Expands a free-dof vector to all dofs using the constrained values.
  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& free_values) const;
};

/// Values of beta . grad_w v + c v_0 at the rule points for every local dof of the cell
/// (rows: points, columns: local dofs).
Eigen::MatrixXd local_residual_operator(const WeakGradientOperator& grad, const CoefficientField& coeffs,
                                        std::size_t cell, const QuadratureRule& rule);

/// Assembles the least-squares form, the stabilizer and the load vector over all dofs. The
/// result has every dof free until apply_inflow_bc is called.
LinearSystem assemble(const WeakGradientOperator& grad, const CoefficientField& coeffs,
                      const AssemblyOptions& options = {});

/// Constrains the facet dofs of the inflow facets to Q_b g and eliminates them symmetrically.
LinearSystem apply_inflow_bc(LinearSystem system, const WeakSpace& space, const CoefficientField& coeffs);
LinearSystem apply_inflow_bc(LinearSystem system, const WeakSpace& space, const CoefficientField& coeffs,
                             const BoundaryClassification& boundary);

enum class SolverKind { Automatic, ConjugateGradient, Cholesky };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

struct SolverOptions {
  SolverKind kind = SolverKind::Automatic;
  double tolerance = 1e-12;
  /// 0 selects 20 * n_free.
  std::size_t max_iterations = 0;
  /// Automatic uses dense Cholesky up to this many free dofs, CG above.
  std::size_t dense_limit = 2000;
};

struct SolverStats {
  SolverKind method = SolverKind::Automatic;
  std::size_t iterations = 0;
  double relative_residual = 0.0; // ||b - A x|| / ||b||, recomputed after the solve
};

struct Solution {
  Eigen::VectorXd coefficients; // all dofs, constrained values included
  SolverStats stats;
};

/// Jacobi-preconditioned conjugate gradients. Throws SolverError with the residual history
/// on breakdown or when the tolerance is not met within max_iterations.
Eigen::VectorXd conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, double tolerance,
                                   std::size_t max_iterations, SolverStats& stats);

/// Cholesky factorization (dense up to dense_limit unknowns, sparse above). Throws SolverError
/// if the matrix is not numerically SPD.
Eigen::VectorXd cholesky_solve(const SparseMatrix& a, const Eigen::VectorXd& b, std::size_t dense_limit,
                               SolverStats& stats);

Solution solve(const LinearSystem& system, const SolverOptions& options = {});

struct ErrorReport {
  double l2_interior = 0.0; // ||Q_0 u - u_0||
  double weak_grad = 0.0;   // ||grad_w (Q_h u - u_h)||
  double energy = 0.0;      // |||Q_h u - u_h||| = a(e, e)^{1/2}
};

/// a(v, v)^{1/2} evaluated by quadrature of the cellwise residual.
double energy_norm(const WeakGradientOperator& grad, const CoefficientField& coeffs, const WeakFunction& v);

ErrorReport error_norms(const WeakGradientOperator& grad, const CoefficientField& coeffs, const WeakFunction& u_h,
                        const ScalarField& exact);

struct ErrorEquationReport {
  double max_residual = 0.0; // max over free test functions of |a(e,v) + s(e,v) + s(Q_h u, v)|
  double scale = 0.0;        // max over free test functions of |(f, beta . grad_w v + c v_0)|

  [[nodiscard]] double relative() const { return scale > 0.0 ? max_residual / scale : max_residual; }
};

/// Evaluates the error equation for e = u_h - Q_h u against every basis function of the
/// test space. Requires a system assembled with keep_parts and with inflow constraints applied.
ErrorEquationReport verify_error_equation(const LinearSystem& system, const WeakFunction& u_h,
                                          const WeakFunction& qh_u);

} // namespace wgls
