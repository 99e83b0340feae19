#include "wgls/error.hpp"
#include "wgls/parallel.hpp"
#include "wgls/system.hpp"

#include <algorithm>

namespace wgls {

namespace {

struct LocalBlocks {
  Eigen::MatrixXd ls;
  Eigen::MatrixXd stab;
  Eigen::VectorXd load;
};

LocalBlocks local_blocks(const WeakGradientOperator& grad, const CoefficientField& coeffs, std::size_t cell_id,
                         double stab_weight) {
  const WeakSpace& space = grad.space();
  const PolyMesh& mesh = space.mesh();
  const LocalSpace& local = space.local(cell_id);
  const QuadratureRule rule = space.cell_rule(cell_id);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));

  LocalBlocks out;
  const Eigen::MatrixXd residual = local_residual_operator(grad, coeffs, cell_id, rule);
  out.ls = residual.transpose() * w.asDiagonal() * residual;
  Eigen::VectorXd fq(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t q = 0; q < rule.size(); ++q) fq(static_cast<Eigen::Index>(q)) = coeffs.f(rule.points[q]);
  out.load = residual.transpose() * w.cwiseProduct(fq);

  const auto nloc = static_cast<Eigen::Index>(local.n_local());
  const Eigen::Index nk = local.interior.dim();
  out.stab = Eigen::MatrixXd::Zero(nloc, nloc);
  const double weight = stab_weight / mesh.cell(cell_id).diameter;
  for (std::size_t i = 0; i < local.facets.size(); ++i) {
    const QuadratureRule frule = space.facet_rule(local.facets[i]);
    const Eigen::Map<const Eigen::VectorXd> fw(frule.weights.data(), static_cast<Eigen::Index>(frule.size()));
    // Jump v_0 - v_b at the facet points.
    Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(frule.size()), nloc);
    jump.leftCols(nk) = local.interior.values(frule.points);
    const Eigen::MatrixXd fvals = local.facet_bases[i].values(frule.points);
    jump.middleCols(static_cast<Eigen::Index>(local.facet_offset(i)), fvals.cols()) = -fvals;
    out.stab += weight * (jump.transpose() * fw.asDiagonal() * jump);
  }
  // Exact symmetry of the local blocks carries over to the global matrix.
  out.ls = 0.5 * (out.ls + out.ls.transpose()).eval();
  out.stab = 0.5 * (out.stab + out.stab.transpose()).eval();
  return out;
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Eigen::Triplet<double>>& triplets) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

} // namespace

void CoefficientField::validate() const {
  if (!beta) throw ConfigError("coefficient field: beta is not set");
  if (!c) throw ConfigError("coefficient field: c is not set");
  if (!f) throw ConfigError("coefficient field: f is not set");
  if (!g) throw ConfigError("coefficient field: g is not set");
}

Eigen::VectorXd LinearSystem::expand(const Eigen::VectorXd& free_values) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(rhs.size());
  for (std::size_t i = 0; i < free_dofs.size(); ++i)
    full(static_cast<Eigen::Index>(free_dofs[i])) = free_values(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < constrained_dofs.size(); ++i)
    full(static_cast<Eigen::Index>(constrained_dofs[i])) = constrained_values(static_cast<Eigen::Index>(i));
  return full;
}

Eigen::MatrixXd local_residual_operator(const WeakGradientOperator& grad, const CoefficientField& coeffs,
                                        std::size_t cell, const QuadratureRule& rule) {
  const WeakSpace& space = grad.space();
  const LocalSpace& local = space.local(cell);
  const LocalWeakGradient& op = grad[cell];
  const Eigen::Index nr = op.basis.dim();
  const Eigen::Index nk = local.interior.dim();

  const Eigen::MatrixXd gvals = op.basis.values(rule.points);
  // Weak gradient components at the points, per local dof.
  const Eigen::MatrixXd gx = gvals * op.matrix.topRows(nr);
  const Eigen::MatrixXd gy = gvals * op.matrix.bottomRows(nr);
  const Eigen::MatrixXd interior = local.interior.values(rule.points);

  Eigen::MatrixXd out(gx.rows(), gx.cols());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto row = static_cast<Eigen::Index>(q);
    const Point b = coeffs.beta(rule.points[q]);
    const double c = coeffs.c(rule.points[q]);
    out.row(row) = b.x() * gx.row(row) + b.y() * gy.row(row);
    out.row(row).head(nk) += c * interior.row(row);
  }
  return out;
}

LinearSystem assemble(const WeakGradientOperator& grad, const CoefficientField& coeffs,
                      const AssemblyOptions& options) {
  coeffs.validate();
  const WeakSpace& space = grad.space();
  const std::size_t n_cells = space.mesh().n_cells();
  const std::size_t n = space.n_dofs();

  std::vector<LocalBlocks> blocks(n_cells);
  parallel_for(n_cells, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) blocks[c] = local_blocks(grad, coeffs, c, options.stabilization_weight);
  });

  std::size_t nnz = 0;
  for (std::size_t c = 0; c < n_cells; ++c) nnz += space.local(c).n_local() * space.local(c).n_local();

  LinearSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<Eigen::Triplet<double>> total;
  std::vector<Eigen::Triplet<double>> ls;
  std::vector<Eigen::Triplet<double>> stab;
  total.reserve(nnz);
  if (options.keep_parts) {
    ls.reserve(nnz);
    stab.reserve(nnz);
  }
  for (std::size_t c = 0; c < n_cells; ++c) {
    const auto& dofs = space.local(c).dofs;
    const LocalBlocks& blk = blocks[c];
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      sys.rhs(static_cast<Eigen::Index>(dofs[i])) += blk.load(ii);
      for (std::size_t j = 0; j < dofs.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const auto gi = static_cast<int>(dofs[i]);
        const auto gj = static_cast<int>(dofs[j]);
        total.emplace_back(gi, gj, blk.ls(ii, jj) + blk.stab(ii, jj));
        if (options.keep_parts) {
          ls.emplace_back(gi, gj, blk.ls(ii, jj));
          stab.emplace_back(gi, gj, blk.stab(ii, jj));
        }
      }
    }
    blocks[c] = LocalBlocks{};
  }
  sys.matrix = from_triplets(n, total);
  if (options.keep_parts) {
    sys.ls_part = from_triplets(n, ls);
    sys.stabilizer_part = from_triplets(n, stab);
  }

  sys.free_dofs.resize(n);
  for (std::size_t i = 0; i < n; ++i) sys.free_dofs[i] = i;
  sys.reduced_matrix = sys.matrix;
  sys.reduced_rhs = sys.rhs;
  return sys;
}

LinearSystem apply_inflow_bc(LinearSystem system, const WeakSpace& space, const CoefficientField& coeffs) {
  coeffs.validate();
  return apply_inflow_bc(std::move(system), space, coeffs, classify_boundary(space.mesh(), coeffs.beta));
}

LinearSystem apply_inflow_bc(LinearSystem system, const WeakSpace& space, const CoefficientField& coeffs,
                             const BoundaryClassification& boundary) {
  coeffs.validate();
  const std::size_t n = system.n_dofs();
  const std::size_t fb = space.facet_block_size();

  std::vector<double> value(n, 0.0);
  std::vector<char> constrained(n, 0);
  for (std::size_t f : boundary.inflow_facets) {
    const Eigen::VectorXd q = project_Qb(coeffs.g, space, f);
    for (std::size_t i = 0; i < fb; ++i) {
      const std::size_t dof = space.facet_dof_offset(f) + i;
      constrained[dof] = 1;
      value[dof] = q(static_cast<Eigen::Index>(i));
    }
  }

  system.free_dofs.clear();
  system.constrained_dofs.clear();
  std::vector<std::size_t> reduced_index(n, kInvalidIndex);
  for (std::size_t i = 0; i < n; ++i) {
    if (constrained[i]) {
      system.constrained_dofs.push_back(i);
    } else {
      reduced_index[i] = system.free_dofs.size();
      system.free_dofs.push_back(i);
    }
  }
  system.constrained_values.resize(static_cast<Eigen::Index>(system.constrained_dofs.size()));
  for (std::size_t i = 0; i < system.constrained_dofs.size(); ++i)
    system.constrained_values(static_cast<Eigen::Index>(i)) = value[system.constrained_dofs[i]];

  const std::size_t nf = system.free_dofs.size();
  system.reduced_rhs.resize(static_cast<Eigen::Index>(nf));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(system.matrix.nonZeros()));
  for (std::size_t r = 0; r < nf; ++r) {
    const auto row = static_cast<Eigen::Index>(system.free_dofs[r]);
    double b = system.rhs(row);
    for (SparseMatrix::InnerIterator it(system.matrix, row); it; ++it) {
      const auto col = static_cast<std::size_t>(it.col());
      if (constrained[col])
        b -= it.value() * value[col];
      else
        triplets.emplace_back(static_cast<int>(r), static_cast<int>(reduced_index[col]), it.value());
    }
    system.reduced_rhs(static_cast<Eigen::Index>(r)) = b;
  }
  system.reduced_matrix = from_triplets(nf, triplets);
  return system;
}

} // namespace wgls
