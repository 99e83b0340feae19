#include "wgls/error.hpp"
#include "wgls/system.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace wgls {

namespace {

double true_relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double bn = b.norm();
  const Eigen::VectorXd r = b - a * x;
  return bn > 0.0 ? r.norm() / bn : r.norm();
}

std::string summarize(const std::vector<double>& history) {
  std::ostringstream os;
  os << "after " << history.size() << " iterations";
  if (!history.empty()) os << ", last relative residual " << history.back();
  return os.str();
}

} // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
  case SolverKind::Automatic: return "auto";
  case SolverKind::ConjugateGradient: return "cg";
  case SolverKind::Cholesky: return "cholesky";
  }
  return "auto";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "auto") return SolverKind::Automatic;
  if (name == "cg") return SolverKind::ConjugateGradient;
  if (name == "cholesky") return SolverKind::Cholesky;
  throw ConfigError("unknown solver '" + name + "' (expected auto, cg or cholesky)");
}

Eigen::VectorXd conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, double tolerance,
                                   std::size_t max_iterations, SolverStats& stats) {
  const Eigen::Index n = b.size();
  stats.method = SolverKind::ConjugateGradient;
  stats.iterations = 0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    stats.relative_residual = 0.0;
    return x;
  }

  Eigen::VectorXd inv_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (!(d > 0.0))
      throw SolverError("not SPD / ill-conditioned: non-positive diagonal entry at row " + std::to_string(i), {});
    inv_diag(i) = 1.0 / d;
  }

  std::vector<double> history;
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(n);
  double rz = r.dot(z);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    ap.noalias() = a * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {
      throw SolverError("not SPD / ill-conditioned: CG breakdown (p^T A p = " + std::to_string(pap) + ") " +
                            summarize(history),
                        history);
    }
    const double alpha = rz / pap;
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    const double rel = r.norm() / bnorm;
    history.push_back(rel);
    stats.iterations = it + 1;
    if (rel <= tolerance) {
      stats.relative_residual = true_relative_residual(a, x, b);
      return x;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverError("not SPD / ill-conditioned: CG did not converge " + summarize(history), history);
}

Eigen::VectorXd cholesky_solve(const SparseMatrix& a, const Eigen::VectorXd& b, std::size_t dense_limit,
                               SolverStats& stats) {
  stats.method = SolverKind::Cholesky;
  stats.iterations = 0;
  Eigen::VectorXd x;
  if (static_cast<std::size_t>(a.rows()) <= dense_limit) {
    const Eigen::MatrixXd dense(a);
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() != Eigen::Success) throw SolverError("not SPD / ill-conditioned: dense Cholesky failed", {});
    x = llt.solve(b);
  } else {
    const Eigen::SparseMatrix<double> col_major(a);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(col_major);
    if (llt.info() != Eigen::Success) throw SolverError("not SPD / ill-conditioned: sparse Cholesky failed", {});
    x = llt.solve(b);
  }
  stats.relative_residual = true_relative_residual(a, x, b);
  return x;
}

Solution solve(const LinearSystem& system, const SolverOptions& options) {
  const std::size_t n = system.n_free();
  if (n == 0) throw SolverError("the free system is empty", {});
  SolverKind kind = options.kind;
  if (kind == SolverKind::Automatic)
    kind = n <= options.dense_limit ? SolverKind::Cholesky : SolverKind::ConjugateGradient;

  Solution out;
  Eigen::VectorXd x;
  if (kind == SolverKind::Cholesky) {
    x = cholesky_solve(system.reduced_matrix, system.reduced_rhs, options.dense_limit, out.stats);
  } else {
    const std::size_t max_it = options.max_iterations > 0 ? options.max_iterations : 20 * n;
    x = conjugate_gradient(system.reduced_matrix, system.reduced_rhs, options.tolerance, max_it, out.stats);
  }
  out.coefficients = system.expand(x);
  return out;
}

} // namespace wgls
