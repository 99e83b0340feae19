#include "wgls/verify.hpp"

#include "wgls/error.hpp"
#include "wgls/system.hpp"
#include "wgls/weakcalc.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace wgls {

double Polynomial::operator()(const Point& p) const {
  double s = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    s += coefficients[i] * std::pow(p.x(), exponents[i][0]) * std::pow(p.y(), exponents[i][1]);
  return s;
}

Point Polynomial::gradient(const Point& p) const {
  Point g = Point::Zero();
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const int a = exponents[i][0];
    const int b = exponents[i][1];
    if (a > 0) g.x() += coefficients[i] * a * std::pow(p.x(), a - 1) * std::pow(p.y(), b);
    if (b > 0) g.y() += coefficients[i] * b * std::pow(p.x(), a) * std::pow(p.y(), b - 1);
  }
  return g;
}

ScalarField Polynomial::field() const {
  return [p = *this](const Point& x) { return p(x); };
}

VectorField Polynomial::gradient_field() const {
  return [p = *this](const Point& x) { return p.gradient(x); };
}

Polynomial random_polynomial(int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial p;
  p.degree = degree;
  for (int d = 0; d <= degree; ++d) {
    for (int a = d; a >= 0; --a) {
      p.exponents.push_back({a, d - a});
      p.coefficients.push_back(u(rng));
    }
  }
  return p;
}

namespace {

std::string describe(const PolyMesh& mesh, int k, int r) {
  std::ostringstream os;
  os << mesh.n_cells() << " cells, k = " << k << ", r = " << r;
  return os.str();
}

// Direct solves keep the algebraic error far below the checked tolerances.
Solution solve_problem(const WeakGradientOperator& grad, const CoefficientField& coeffs) {
  LinearSystem system = apply_inflow_bc(assemble(grad, coeffs), grad.space(), coeffs);
  SolverOptions options;
  options.kind = SolverKind::Cholesky;
  return solve(system, options);
}

} // namespace

CheckResult check_commutativity(const PolyMesh& mesh, int k, int r, std::uint64_t seed, double tolerance) {
  const Polynomial w = random_polynomial(k, seed);
  const WeakSpace space(mesh, k, r);
  const WeakGradientOperator grad(space);
  const CommutativityReport rep = verify_commutativity(grad, w.field(), w.gradient_field());
  return {"commutativity", rep.relative(), tolerance, describe(mesh, k, r)};
}

CheckResult check_spd(const PolyMesh& mesh, int k, int r, double tolerance) {
  const ProblemSpec problem = make_problem("sin");
  const CoefficientField coeffs = problem.coefficients();
  const WeakSpace space(mesh, k, r);
  const WeakGradientOperator grad(space);
  const LinearSystem system = apply_inflow_bc(assemble(grad, coeffs), space, coeffs);
  const Eigen::MatrixXd a(system.reduced_matrix);
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  std::ostringstream os;
  os << describe(mesh, k, r) << ", asymmetry " << asym << ", smallest eigenvalue " << lmin;
  return {"spd", std::max(asym, lmin > 0.0 ? 0.0 : 1.0), tolerance, os.str()};
}

CheckResult check_patch(const PolyMesh& mesh, int k, int r, const std::string& problem_name, double tolerance) {
  const ProblemSpec problem = make_problem(problem_name);
  const CoefficientField coeffs = problem.coefficients();
  SpaceOptions options;
  options.coefficient_degree = problem.c_degree;
  const WeakSpace space(mesh, k, r, options);
  const WeakGradientOperator grad(space);
  const Solution sol = solve_problem(grad, coeffs);
  const ErrorReport e = error_norms(grad, coeffs, WeakFunction(space, sol.coefficients), problem.u);
  const double worst = std::max({e.l2_interior, e.weak_grad, e.energy});
  return {"patch " + problem_name, worst, tolerance, describe(mesh, k, r)};
}

CheckResult check_error_equation(const PolyMesh& mesh, int k, int r, std::uint64_t seed, double tolerance) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ub(0.5, 1.5);
  std::uniform_real_distribution<double> uc(0.0, 2.0);
  std::array<Point, 4> betas;
  std::array<double, 4> cs{};
  for (int q = 0; q < 4; ++q) {
    betas[q] = Point(ub(rng), ub(rng));
    cs[q] = uc(rng);
  }
  const Polynomial u = random_polynomial(k + 2, rng());
  // Quadrants of the mesh bounding box.
  Point lo = mesh.vertices().front();
  Point hi = lo;
  for (const Point& v : mesh.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Point mid = 0.5 * (lo + hi);
  auto quadrant = [mid](const Point& x) { return (x.x() < mid.x() ? 0 : 1) + (x.y() < mid.y() ? 0 : 2); };

  CoefficientField coeffs;
  coeffs.beta = [=](const Point& x) { return betas[quadrant(x)]; };
  coeffs.c = [=](const Point& x) { return cs[quadrant(x)]; };
  coeffs.f = [=](const Point& x) {
    const int q = quadrant(x);
    return betas[q].dot(u.gradient(x)) + cs[q] * u(x);
  };
  coeffs.g = u.field();

  SpaceOptions options;
  options.coefficient_degree = 0;
  const WeakSpace space(mesh, k, r, options);
  const WeakGradientOperator grad(space);
  AssemblyOptions aopts;
  aopts.keep_parts = true;
  const LinearSystem system = apply_inflow_bc(assemble(grad, coeffs, aopts), space, coeffs);
  const Solution sol = solve(system);
  const ErrorEquationReport rep =
      verify_error_equation(system, WeakFunction(space, sol.coefficients), project_Qh(u.field(), space));
  std::ostringstream os;
  os << describe(mesh, k, r) << ", seed " << seed << ", scale " << rep.scale;
  return {"error-equation", rep.relative(), tolerance, os.str()};
}

CheckResult check_zero_data(const PolyMesh& mesh, int k, int r, double tolerance) {
  const ProblemSpec problem = make_problem("zero");
  const CoefficientField coeffs = problem.coefficients();
  const WeakSpace space(mesh, k, r);
  const WeakGradientOperator grad(space);
  const Solution sol = solve_problem(grad, coeffs);
  const double m = sol.coefficients.size() ? sol.coefficients.cwiseAbs().maxCoeff() : 0.0;
  return {"zero-data", m, tolerance, describe(mesh, k, r)};
}

std::vector<CheckResult> run_verify_suite(const std::string& suite, int degree) {
  if (degree < 1 || degree > 6) throw ConfigError("degree k must satisfy 1 <= k <= 6");
  const bool all = suite == "all";
  if (!all && suite != "commutativity" && suite != "spd" && suite != "patch" && suite != "error-equation" &&
      suite != "zero")
    throw ConfigError("unknown suite '" + suite + "'");
  const int k = degree;
  const PolyMesh tri = generate_triangular(3);
  const PolyMesh poly = generate_nonconvex_polygonal(2);
  std::vector<CheckResult> out;
  if (all || suite == "commutativity") {
    for (int r = k; r <= k + 2; ++r) {
      out.push_back(check_commutativity(tri, k, r, 100 + r));
      out.push_back(check_commutativity(poly, k, r, 200 + r));
    }
  }
  if (all || suite == "spd") {
    out.push_back(check_spd(generate_triangular(2), k, k + 1));
    out.push_back(check_spd(generate_nonconvex_polygonal(1), k, k + 2));
  }
  if (all || suite == "patch") {
    for (const std::string name : {"patch-linear", "patch-quadratic"}) {
      if (name == "patch-quadratic" && k < 2) continue;
      out.push_back(check_patch(tri, k, k + 1, name));
      out.push_back(check_patch(poly, k, k + 2, name));
    }
  }
  if (all || suite == "error-equation") {
    for (std::uint64_t s = 1; s <= 3; ++s) {
      out.push_back(check_error_equation(tri, k, k, s));
      out.push_back(check_error_equation(poly, k, k, s + 10));
    }
  }
  if (all || suite == "zero") out.push_back(check_zero_data(tri, k, k + 1));
  return out;
}

} // namespace wgls
