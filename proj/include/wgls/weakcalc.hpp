#pragma once

#include "wgls/fields.hpp"
#include "wgls/polymesh.hpp"
#include "wgls/polyquad.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace wgls {

struct SpaceOptions {
  /// Polynomial degree of the reaction coefficient as seen by the cell quadrature (capped at 2).
  int coefficient_degree = 2;
  /// Use orthonormalized cell bases everywhere instead of plain scaled monomials.
  bool orthonormalize = false;
  /// Added to every default quadrature exactness degree.
  int extra_quadrature = 0;
};

/// Per-cell view of the weak space. Local dofs are the interior block followed by one block
/// per facet, facets in ascending global id.
struct LocalSpace {
  CellBasis interior;
  std::vector<std::size_t> facets;
  std::vector<FacetBasis> facet_bases;
  std::vector<std::size_t> dofs; // global dof of each local dof

  [[nodiscard]] std::size_t n_local() const { return dofs.size(); }
  /// Offset of the block of the i-th facet (in `facets` order) within the local dofs.
  [[nodiscard]] std::size_t facet_offset(std::size_t i) const;
};

/// Weak finite element space W_h: P_k on every cell interior and P_k on every facet, facet
/// values single-valued. Global numbering: all interior blocks in cell order, then all facet
/// blocks in facet order.
class WeakSpace {
public:
  WeakSpace(const PolyMesh& mesh, int degree, int grad_degree, SpaceOptions options = {});

  [[nodiscard]] const PolyMesh& mesh() const { return *mesh_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int grad_degree() const { return grad_degree_; }
  [[nodiscard]] const SpaceOptions& options() const { return options_; }

  [[nodiscard]] std::size_t n_dofs() const { return n_dofs_; }
  [[nodiscard]] std::size_t cell_block_size() const { return static_cast<std::size_t>(poly_dim(degree_)); }
  [[nodiscard]] std::size_t facet_block_size() const { return static_cast<std::size_t>(degree_ + 1); }
  [[nodiscard]] std::size_t cell_dof_offset(std::size_t cell) const { return cell * cell_block_size(); }
  [[nodiscard]] std::size_t facet_dof_offset(std::size_t facet) const {
    return mesh_->n_cells() * cell_block_size() + facet * facet_block_size();
  }

  [[nodiscard]] const LocalSpace& local(std::size_t cell) const { return locals_.at(cell); }
  [[nodiscard]] FacetBasis facet_basis(std::size_t facet) const;

  [[nodiscard]] int cell_quadrature_degree() const;
  [[nodiscard]] int facet_quadrature_degree() const;
  [[nodiscard]] QuadratureRule cell_rule(std::size_t cell) const;
  [[nodiscard]] QuadratureRule facet_rule(std::size_t facet) const;

private:
  const PolyMesh* mesh_;
  int degree_;
  int grad_degree_;
  SpaceOptions options_;
  std::size_t n_dofs_ = 0;
  std::vector<LocalSpace> locals_;
};

/// Coefficient vector of a weak function {v_0, v_b} over a WeakSpace.
struct WeakFunction {
  const WeakSpace* space = nullptr;
  Eigen::VectorXd coefficients;

  WeakFunction() = default;
  explicit WeakFunction(const WeakSpace& s) : space(&s), coefficients(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.n_dofs()))) {}
  WeakFunction(const WeakSpace& s, Eigen::VectorXd coeffs);

  /// Coefficients of the cell's local dofs.
  [[nodiscard]] Eigen::VectorXd local(std::size_t cell) const;
  [[nodiscard]] Eigen::VectorXd interior(std::size_t cell) const;
  [[nodiscard]] Eigen::VectorXd facet(std::size_t facet) const;
};

/// Discrete weak gradient of one cell: `matrix` maps local weak dofs to the coefficients of
/// the weak gradient in [P_r(T)]^2, x-component rows first.
struct LocalWeakGradient {
  CellBasis basis;
  Eigen::MatrixXd mass;
  Eigen::MatrixXd matrix;
  double residual = 0.0; // max |M G - B| / max |B| of the defining equations
};

/// Reciprocal condition estimate below which the gradient basis is orthonormalized.
inline constexpr double kMassConditionFloor = 1e-14;

LocalWeakGradient build_weak_gradient(const WeakSpace& space, std::size_t cell);

class WeakGradientOperator {
public:
  /// Builds every cell's operator (in parallel over cells).
  explicit WeakGradientOperator(const WeakSpace& space);

  [[nodiscard]] const WeakSpace& space() const { return *space_; }
  [[nodiscard]] const LocalWeakGradient& operator[](std::size_t cell) const { return cells_.at(cell); }
  [[nodiscard]] std::size_t size() const { return cells_.size(); }

  /// Gradient coefficients of v on the cell (layout of LocalWeakGradient::matrix rows).
  [[nodiscard]] Eigen::VectorXd apply(const WeakFunction& v, std::size_t cell) const;

  /// Largest defining-equation residual over all cells.
  [[nodiscard]] double max_residual() const;

private:
  const WeakSpace* space_;
  std::vector<LocalWeakGradient> cells_;
};

/// L2 projection onto P_k(T) in the space's interior basis.
Eigen::VectorXd project_Q0(const ScalarField& f, const WeakSpace& space, std::size_t cell);
/// L2 projection onto P_k(e) in the facet basis.
Eigen::VectorXd project_Qb(const ScalarField& g, const WeakSpace& space, std::size_t facet);
/// {Q_0 u, Q_b u} on every cell and facet.
WeakFunction project_Qh(const ScalarField& u, const WeakSpace& space);
/// L2 projection of a vector field onto [P_r(T)]^2 in the operator's basis, x-component first.
Eigen::VectorXd project_gradient(const VectorField& field, const WeakSpace& space,
                                 const LocalWeakGradient& op, std::size_t cell);

struct CommutativityReport {
  double max_residual = 0.0;  // max_T || grad_w(Q_h w) - Q_r(grad w) ||_T
  double max_reference = 0.0; // max_T || Q_r(grad w) ||_T

  [[nodiscard]] double relative() const { return max_reference > 0.0 ? max_residual / max_reference : max_residual; }
};

/// Compares the weak gradient of Q_h w with the projection of the exact gradient onto [P_r]^2.
CommutativityReport verify_commutativity(const WeakGradientOperator& grad, const ScalarField& w,
                                         const VectorField& grad_w);

} // namespace wgls
