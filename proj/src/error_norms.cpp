#include "wgls/error.hpp"
#include "wgls/parallel.hpp"
#include "wgls/system.hpp"

#include <algorithm>
#include <cmath>

namespace wgls {

double energy_norm(const WeakGradientOperator& grad, const CoefficientField& coeffs, const WeakFunction& v) {
  const WeakSpace& space = grad.space();
  const std::size_t n_cells = space.mesh().n_cells();
  std::vector<double> per_cell(n_cells, 0.0);
  parallel_for(n_cells, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const QuadratureRule rule = space.cell_rule(c);
      const Eigen::VectorXd values = local_residual_operator(grad, coeffs, c, rule) * v.local(c);
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double r = values(static_cast<Eigen::Index>(q));
        sum += rule.weights[q] * r * r;
      }
      per_cell[c] = sum;
    }
  });
  double total = 0.0;
  for (double s : per_cell) total += s;
  return std::sqrt(total);
}

ErrorReport error_norms(const WeakGradientOperator& grad, const CoefficientField& coeffs, const WeakFunction& u_h,
                        const ScalarField& exact) {
  const WeakSpace& space = grad.space();
  const WeakFunction qh = project_Qh(exact, space);
  const WeakFunction e(space, qh.coefficients - u_h.coefficients);

  const std::size_t n_cells = space.mesh().n_cells();
  std::vector<double> l2(n_cells, 0.0);
  std::vector<double> wg(n_cells, 0.0);
  parallel_for(n_cells, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const QuadratureRule rule = space.cell_rule(c);
      const Eigen::MatrixXd interior = space.local(c).interior.values(rule.points);
      const Eigen::VectorXd d0 = e.interior(c);
      l2[c] = d0.dot(mass_matrix(interior, rule) * d0);

      const LocalWeakGradient& op = grad[c];
      const Eigen::Index nr = op.basis.dim();
      const Eigen::VectorXd g = op.matrix * e.local(c);
      wg[c] = g.head(nr).dot(op.mass * g.head(nr)) + g.tail(nr).dot(op.mass * g.tail(nr));
    }
  });
  ErrorReport report;
  double l2_sum = 0.0;
  double wg_sum = 0.0;
  for (std::size_t c = 0; c < n_cells; ++c) {
    l2_sum += l2[c];
    wg_sum += wg[c];
  }
  report.l2_interior = std::sqrt(std::max(0.0, l2_sum));
  report.weak_grad = std::sqrt(std::max(0.0, wg_sum));
  report.energy = energy_norm(grad, coeffs, e);
  return report;
}

ErrorEquationReport verify_error_equation(const LinearSystem& system, const WeakFunction& u_h,
                                          const WeakFunction& qh_u) {
  if (system.stabilizer_part.rows() == 0)
    throw ConfigError("verify_error_equation needs a system assembled with keep_parts");
  const Eigen::VectorXd e = u_h.coefficients - qh_u.coefficients;
  const Eigen::VectorXd lhs = system.matrix * e;
  const Eigen::VectorXd rhs = -(system.stabilizer_part * qh_u.coefficients);

  ErrorEquationReport report;
  for (std::size_t dof : system.free_dofs) {
    const auto i = static_cast<Eigen::Index>(dof);
    report.max_residual = std::max(report.max_residual, std::abs(lhs(i) - rhs(i)));
    report.scale = std::max(report.scale, std::abs(system.rhs(i)));
  }
  return report;
}

} // namespace wgls
