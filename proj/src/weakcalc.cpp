#include "wgls/weakcalc.hpp"

#include "wgls/error.hpp"
#include "wgls/parallel.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace wgls {

namespace {

Eigen::Map<const Eigen::VectorXd> weights_of(const QuadratureRule& rule) {
  return {rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size())};
}

Eigen::VectorXd sample(const ScalarField& f, const QuadratureRule& rule) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t i = 0; i < rule.size(); ++i) out(static_cast<Eigen::Index>(i)) = f(rule.points[i]);
  return out;
}

// Solves M c = V^T W f for the L2 projection coefficients.
Eigen::VectorXd l2_fit(const Eigen::MatrixXd& values, const QuadratureRule& rule, const Eigen::VectorXd& samples) {
  const Eigen::MatrixXd m = mass_matrix(values, rule);
  const Eigen::VectorXd rhs = values.transpose() * (weights_of(rule).cwiseProduct(samples));
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw GeometryError("mass matrix is not positive definite");
  return llt.solve(rhs);
}

} // namespace

std::size_t LocalSpace::facet_offset(std::size_t i) const {
  return static_cast<std::size_t>(interior.dim()) + i * static_cast<std::size_t>(facet_bases.front().dim());
}

WeakSpace::WeakSpace(const PolyMesh& mesh, int degree, int grad_degree, SpaceOptions options)
    : mesh_(&mesh), degree_(degree), grad_degree_(grad_degree), options_(options) {
  if (degree < 1) throw ConfigError("weak space degree k must be >= 1");
  if (grad_degree < 0) throw ConfigError("weak gradient degree r must be >= 0");
  if (options_.coefficient_degree < 0) throw ConfigError("coefficient degree must be >= 0");

  n_dofs_ = mesh.n_cells() * cell_block_size() + mesh.n_facets() * facet_block_size();
  locals_.reserve(mesh.n_cells());
  for (const auto& cell : mesh.cells()) {
    LocalSpace local{CellBasis(cell, degree_), {}, {}, {}};
    if (options_.orthonormalize) local.interior.orthonormalize(cell_rule(cell.id));
    local.facets = cell.facet_ids;
    std::sort(local.facets.begin(), local.facets.end());
    local.dofs.reserve(cell_block_size() + local.facets.size() * facet_block_size());
    for (std::size_t i = 0; i < cell_block_size(); ++i) local.dofs.push_back(cell_dof_offset(cell.id) + i);
    for (std::size_t f : local.facets) {
      local.facet_bases.push_back(facet_basis(f));
      for (std::size_t i = 0; i < facet_block_size(); ++i) local.dofs.push_back(facet_dof_offset(f) + i);
    }
    locals_.push_back(std::move(local));
  }
}

FacetBasis WeakSpace::facet_basis(std::size_t facet) const { return FacetBasis(*mesh_, mesh_->facet(facet), degree_); }

int WeakSpace::cell_quadrature_degree() const {
  const int cdeg = std::min(options_.coefficient_degree, 2);
  return 2 * grad_degree_ + std::max(2, 2 * cdeg) + options_.extra_quadrature;
}

int WeakSpace::facet_quadrature_degree() const {
  return std::max(2 * degree_ + 2, degree_ + grad_degree_) + options_.extra_quadrature;
}

QuadratureRule WeakSpace::cell_rule(std::size_t cell) const {
  return cell_quadrature(*mesh_, mesh_->cell(cell), cell_quadrature_degree());
}

QuadratureRule WeakSpace::facet_rule(std::size_t facet) const {
  return facet_quadrature(*mesh_, mesh_->facet(facet), facet_quadrature_degree());
}

WeakFunction::WeakFunction(const WeakSpace& s, Eigen::VectorXd coeffs) : space(&s), coefficients(std::move(coeffs)) {
  if (static_cast<std::size_t>(coefficients.size()) != s.n_dofs())
    throw ConfigError("weak function coefficient count does not match the space");
}

Eigen::VectorXd WeakFunction::local(std::size_t cell) const {
  const auto& dofs = space->local(cell).dofs;
  Eigen::VectorXd out(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = coefficients(static_cast<Eigen::Index>(dofs[i]));
  return out;
}

Eigen::VectorXd WeakFunction::interior(std::size_t cell) const {
  return coefficients.segment(static_cast<Eigen::Index>(space->cell_dof_offset(cell)),
                              static_cast<Eigen::Index>(space->cell_block_size()));
}

Eigen::VectorXd WeakFunction::facet(std::size_t facet) const {
  return coefficients.segment(static_cast<Eigen::Index>(space->facet_dof_offset(facet)),
                              static_cast<Eigen::Index>(space->facet_block_size()));
}

LocalWeakGradient build_weak_gradient(const WeakSpace& space, std::size_t cell_id) {
  const PolyMesh& mesh = space.mesh();
  const Cell& cell = mesh.cell(cell_id);
  const LocalSpace& local = space.local(cell_id);
  const QuadratureRule rule = space.cell_rule(cell_id);

  LocalWeakGradient out{CellBasis(cell, space.grad_degree()), {}, {}, 0.0};
  if (space.options().orthonormalize) out.basis.orthonormalize(rule);

  out.mass = mass_matrix(out.basis.values(rule.points), rule);
  Eigen::LLT<Eigen::MatrixXd> llt(out.mass);
  if (llt.info() != Eigen::Success || llt.rcond() < kMassConditionFloor) {
    if (out.basis.orthonormal())
      throw GeometryError("singular local mass matrix on cell " + std::to_string(cell_id));
    out.basis.orthonormalize(rule);
    out.mass = mass_matrix(out.basis.values(rule.points), rule);
    llt.compute(out.mass);
    if (llt.info() != Eigen::Success)
      throw GeometryError("singular local mass matrix on cell " + std::to_string(cell_id));
  }

  const Eigen::Index nr = out.basis.dim();
  const auto nloc = static_cast<Eigen::Index>(local.n_local());
  const Eigen::Index nk = local.interior.dim();

  // Right-hand side of (G v, psi) = -(v_0, div psi) + <v_b, psi.n>.
  Eigen::MatrixXd rhs_x = Eigen::MatrixXd::Zero(nr, nloc);
  Eigen::MatrixXd rhs_y = Eigen::MatrixXd::Zero(nr, nloc);
  {
    const auto grads = out.basis.gradients(rule.points);
    const Eigen::MatrixXd interior = local.interior.values(rule.points);
    const auto w = weights_of(rule);
    rhs_x.leftCols(nk) = -grads[0].transpose() * w.asDiagonal() * interior;
    rhs_y.leftCols(nk) = -grads[1].transpose() * w.asDiagonal() * interior;
  }
  for (std::size_t i = 0; i < local.facets.size(); ++i) {
    const Facet& facet = mesh.facet(local.facets[i]);
    const QuadratureRule frule = space.facet_rule(facet.id);
    const Eigen::MatrixXd trace = out.basis.values(frule.points);
    const Eigen::MatrixXd fvals = local.facet_bases[i].values(frule.points);
    const Eigen::MatrixXd coupling = trace.transpose() * weights_of(frule).asDiagonal() * fvals;
    const Point& n = facet.normal(cell_id);
    const auto off = static_cast<Eigen::Index>(local.facet_offset(i));
    rhs_x.middleCols(off, fvals.cols()) += n.x() * coupling;
    rhs_y.middleCols(off, fvals.cols()) += n.y() * coupling;
  }

  out.matrix.resize(2 * nr, nloc);
  out.matrix.topRows(nr) = llt.solve(rhs_x);
  out.matrix.bottomRows(nr) = llt.solve(rhs_y);

  const double scale = std::max({rhs_x.cwiseAbs().maxCoeff(), rhs_y.cwiseAbs().maxCoeff(), 1e-300});
  const double res_x = (out.mass * out.matrix.topRows(nr) - rhs_x).cwiseAbs().maxCoeff();
  const double res_y = (out.mass * out.matrix.bottomRows(nr) - rhs_y).cwiseAbs().maxCoeff();
  out.residual = std::max(res_x, res_y) / scale;
  return out;
}

WeakGradientOperator::WeakGradientOperator(const WeakSpace& space) : space_(&space) {
  const std::size_t n = space.mesh().n_cells();
  std::vector<std::optional<LocalWeakGradient>> built(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) built[c].emplace(build_weak_gradient(space, c));
  });
  cells_.reserve(n);
  for (auto& b : built) cells_.push_back(std::move(*b));
}

Eigen::VectorXd WeakGradientOperator::apply(const WeakFunction& v, std::size_t cell) const {
  return cells_.at(cell).matrix * v.local(cell);
}

double WeakGradientOperator::max_residual() const {
  double r = 0.0;
  for (const auto& c : cells_) r = std::max(r, c.residual);
  return r;
}

Eigen::VectorXd project_Q0(const ScalarField& f, const WeakSpace& space, std::size_t cell) {
  const QuadratureRule rule = space.cell_rule(cell);
  return l2_fit(space.local(cell).interior.values(rule.points), rule, sample(f, rule));
}

Eigen::VectorXd project_Qb(const ScalarField& g, const WeakSpace& space, std::size_t facet) {
  const QuadratureRule rule = space.facet_rule(facet);
  return l2_fit(space.facet_basis(facet).values(rule.points), rule, sample(g, rule));
}

WeakFunction project_Qh(const ScalarField& u, const WeakSpace& space) {
  WeakFunction out(space);
  const PolyMesh& mesh = space.mesh();
  parallel_for(mesh.n_cells(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c)
      out.coefficients.segment(static_cast<Eigen::Index>(space.cell_dof_offset(c)),
                               static_cast<Eigen::Index>(space.cell_block_size())) = project_Q0(u, space, c);
  });
  parallel_for(mesh.n_facets(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f)
      out.coefficients.segment(static_cast<Eigen::Index>(space.facet_dof_offset(f)),
                               static_cast<Eigen::Index>(space.facet_block_size())) = project_Qb(u, space, f);
  });
  return out;
}

Eigen::VectorXd project_gradient(const VectorField& field, const WeakSpace& space, const LocalWeakGradient& op,
                                 std::size_t cell) {
  const QuadratureRule rule = space.cell_rule(cell);
  const Eigen::MatrixXd values = op.basis.values(rule.points);
  Eigen::VectorXd fx(static_cast<Eigen::Index>(rule.size()));
  Eigen::VectorXd fy(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point v = field(rule.points[i]);
    fx(static_cast<Eigen::Index>(i)) = v.x();
    fy(static_cast<Eigen::Index>(i)) = v.y();
  }
  const Eigen::Index nr = op.basis.dim();
  Eigen::VectorXd out(2 * nr);
  out.head(nr) = l2_fit(values, rule, fx);
  out.tail(nr) = l2_fit(values, rule, fy);
  return out;
}

CommutativityReport verify_commutativity(const WeakGradientOperator& grad, const ScalarField& w,
                                         const VectorField& grad_w) {
  const WeakSpace& space = grad.space();
  const WeakFunction qw = project_Qh(w, space);
  CommutativityReport report;
  for (std::size_t c = 0; c < grad.size(); ++c) {
    const LocalWeakGradient& op = grad[c];
    const Eigen::Index nr = op.basis.dim();
    const Eigen::VectorXd weak = grad.apply(qw, c);
    const Eigen::VectorXd exact = project_gradient(grad_w, space, op, c);
    const Eigen::VectorXd d = weak - exact;
    auto norm2 = [&](const Eigen::VectorXd& v) {
      return v.head(nr).dot(op.mass * v.head(nr)) + v.tail(nr).dot(op.mass * v.tail(nr));
    };
    report.max_residual = std::max(report.max_residual, std::sqrt(std::max(0.0, norm2(d))));
    report.max_reference = std::max(report.max_reference, std::sqrt(std::max(0.0, norm2(exact))));
  }
  return report;
}

} // namespace wgls
