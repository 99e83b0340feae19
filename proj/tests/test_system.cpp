#include "wgls/convergence.hpp"
#include "wgls/error.hpp"
#include "wgls/system.hpp"
#include "wgls/verify.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace {

using wgls::Point;

struct Fixture {
  wgls::PolyMesh mesh;
  wgls::WeakSpace space;
  wgls::WeakGradientOperator grad;

  Fixture(wgls::PolyMesh m, int k, int r) : mesh(std::move(m)), space(mesh, k, r), grad(space) {}
};

wgls::LinearSystem build(const Fixture& fx, const wgls::CoefficientField& coeffs, bool keep_parts = true) {
  wgls::AssemblyOptions opts;
  opts.keep_parts = keep_parts;
  return wgls::apply_inflow_bc(wgls::assemble(fx.grad, coeffs, opts), fx.space, coeffs);
}

// Constant beta and c with a polynomial exact solution of degree k + 2, so that every
// integral in the error equation is computed exactly.
wgls::CoefficientField polynomial_data(const Point& beta, double c, const wgls::Polynomial& u) {
  wgls::CoefficientField coeffs;
  coeffs.beta = wgls::constant_field(beta);
  coeffs.c = wgls::constant_field(c);
  coeffs.g = u.field();
  coeffs.f = [beta, c, u](const Point& p) { return beta.dot(u.gradient(p)) + c * u(p); };
  return coeffs;
}

TEST(Assembly, MatrixIsSymmetric) {
  for (auto family : {wgls::MeshFamily::Triangular, wgls::MeshFamily::NonconvexPolygonal}) {
    Fixture fx(wgls::make_mesh(family, 2), 2, wgls::default_grad_degree(family, 2));
    const auto sys = build(fx, wgls::make_problem("sin", 5.0).coefficients());
    const Eigen::MatrixXd a(sys.matrix);
    const double scale = a.cwiseAbs().maxCoeff();
    EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-13 * scale);
    EXPECT_NEAR((Eigen::MatrixXd(sys.ls_part) + Eigen::MatrixXd(sys.stabilizer_part) - a).cwiseAbs().maxCoeff(),
                0.0, 1e-13 * scale);
  }
}

TEST(Assembly, ReducedSystemIsPositiveDefinite) {
  for (int k = 1; k <= 3; ++k) {
    EXPECT_TRUE(wgls::check_spd(wgls::generate_triangular(2), k, k + 1).passed());
    EXPECT_TRUE(wgls::check_spd(wgls::generate_nonconvex_polygonal(1), k, k + 2).passed());
  }
}

TEST(Assembly, EnergyNormMatchesLeastSquaresForm) {
  Fixture fx(wgls::generate_nonconvex_polygonal(1), 2, 4);
  const auto coeffs = wgls::make_problem("sin", 3.0).coefficients();
  const auto sys = build(fx, coeffs);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v(Eigen::Index(fx.space.n_dofs()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
    const double quad = v.dot(sys.ls_part * v);
    const double e = wgls::energy_norm(fx.grad, coeffs, wgls::WeakFunction(fx.space, v));
    EXPECT_NEAR(e * e, quad, 1e-11 * quad);
  }
}

TEST(Assembly, NormOnSpaceWithZeroInflowTrace) {
  Fixture fx(wgls::generate_nonconvex_polygonal(1), 1, 3);
  const auto sys = build(fx, wgls::make_problem("sin").coefficients());
  std::mt19937_64 rng(12);
  std::normal_distribution<double> u;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd v(Eigen::Index(sys.n_free()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
    EXPECT_GT(v.dot(sys.reduced_matrix * v), 0.0);
  }
}

TEST(Assembly, StabilizerVanishesOnProjectedPolynomials) {
  Fixture fx(wgls::generate_nonconvex_polygonal(2), 3, 5);
  const auto sys = build(fx, wgls::make_problem("sin").coefficients());
  const auto qh = wgls::project_Qh(wgls::random_polynomial(3, 4).field(), fx.space);
  const Eigen::VectorXd s = sys.stabilizer_part * qh.coefficients;
  EXPECT_LT(s.cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Assembly, InflowConstraintsForZeroData) {
  Fixture fx(wgls::generate_triangular(2), 2, 3);
  const auto coeffs = wgls::make_problem("zero").coefficients();
  const auto sys = build(fx, coeffs);
  const auto boundary = wgls::classify_boundary(fx.mesh, coeffs.beta);
  EXPECT_EQ(sys.constrained_dofs.size(), boundary.inflow_facets.size() * 3);
  EXPECT_EQ(sys.n_free() + sys.constrained_dofs.size(), sys.n_dofs());
  EXPECT_EQ(sys.constrained_values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sys.reduced_rhs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, MissingCoefficientIsConfigError) {
  Fixture fx(wgls::generate_triangular(1), 1, 2);
  wgls::CoefficientField coeffs = wgls::make_problem("sin").coefficients();
  coeffs.f = nullptr;
  EXPECT_THROW(wgls::assemble(fx.grad, coeffs), wgls::ConfigError);
}

TEST(Solve, SingleSquareCellPatch) {
  const wgls::PolyMesh mesh({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {{0, 1, 2, 3}});
  const auto problem = wgls::make_problem("patch-linear");
  Fixture fx(mesh, 1, 2);
  const auto sys = build(fx, problem.coefficients());
  EXPECT_EQ(sys.constrained_dofs.size(), 4u);
  const auto sol = wgls::solve(sys);
  const auto e = wgls::error_norms(fx.grad, problem.coefficients(), wgls::WeakFunction(fx.space, sol.coefficients),
                                   problem.u);
  EXPECT_LT(e.l2_interior, 1e-12);
  EXPECT_LT(e.energy, 1e-12);
}

TEST(Solve, PatchTestsAreExact) {
  for (int k = 1; k <= 3; ++k) {
    for (const char* name : {"patch-linear", "patch-quadratic"}) {
      if (k == 1 && std::string(name) == "patch-quadratic") continue;
      const auto tri = wgls::check_patch(wgls::generate_triangular(3), k, k + 1, name, 1e-10);
      const auto poly = wgls::check_patch(wgls::generate_nonconvex_polygonal(2), k, k + 2, name, 1e-10);
      EXPECT_TRUE(tri.passed()) << name << " k " << k << " " << tri.value;
      EXPECT_TRUE(poly.passed()) << name << " k " << k << " " << poly.value;
    }
  }
}

TEST(Solve, ConjugateGradientAgreesWithCholesky) {
  Fixture fx(wgls::generate_triangular(3), 1, 2);
  const auto sys = build(fx, wgls::make_problem("sin").coefficients(), false);
  wgls::SolverOptions cg;
  cg.kind = wgls::SolverKind::ConjugateGradient;
  wgls::SolverOptions ch;
  ch.kind = wgls::SolverKind::Cholesky;
  const auto a = wgls::solve(sys, cg);
  const auto b = wgls::solve(sys, ch);
  EXPECT_EQ(a.stats.method, wgls::SolverKind::ConjugateGradient);
  EXPECT_GT(a.stats.iterations, 0u);
  EXPECT_EQ(b.stats.method, wgls::SolverKind::Cholesky);
  const Eigen::VectorXd d = a.coefficients - b.coefficients;
  const double rel = std::sqrt(d.dot(sys.matrix * d) / b.coefficients.dot(sys.matrix * b.coefficients));
  EXPECT_LT(rel, 1e-9);
}

TEST(Solve, AutomaticSelection) {
  Fixture fx(wgls::generate_triangular(1), 1, 2);
  const auto sys = build(fx, wgls::make_problem("sin").coefficients(), false);
  wgls::SolverOptions opts;
  EXPECT_EQ(wgls::solve(sys, opts).stats.method, wgls::SolverKind::Cholesky);
  opts.dense_limit = 1;
  EXPECT_EQ(wgls::solve(sys, opts).stats.method, wgls::SolverKind::ConjugateGradient);
}

TEST(Solve, SmallSystems) {
  wgls::SparseMatrix a(2, 2);
  a.insert(0, 0) = 4.0;
  a.insert(0, 1) = 1.0;
  a.insert(1, 0) = 1.0;
  a.insert(1, 1) = 3.0;
  const Eigen::Vector2d b(5.0, 4.0);
  wgls::SolverStats stats;
  const Eigen::VectorXd x = wgls::conjugate_gradient(a, b, 1e-14, 10, stats);
  EXPECT_NEAR(x(0), 1.0, 1e-13);
  EXPECT_NEAR(x(1), 1.0, 1e-13);
  EXPECT_LE(stats.iterations, 2u);
  const Eigen::VectorXd y = wgls::cholesky_solve(a, b, 2000, stats);
  EXPECT_NEAR(y(0), 1.0, 1e-14);
  EXPECT_NEAR(y(1), 1.0, 1e-14);

  wgls::SparseMatrix id(5, 5);
  id.setIdentity();
  const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
  EXPECT_NEAR((wgls::conjugate_gradient(id, c, 1e-14, 5, stats) - c).norm(), 0.0, 1e-14);
  EXPECT_EQ(stats.iterations, 1u);
  EXPECT_NEAR((wgls::cholesky_solve(id, c, 0, stats) - c).norm(), 0.0, 1e-14);
}

TEST(Solve, FailuresReportHistory) {
  wgls::SparseMatrix indefinite(2, 2);
  indefinite.insert(0, 0) = 1.0;
  indefinite.insert(0, 1) = 2.0;
  indefinite.insert(1, 0) = 2.0;
  indefinite.insert(1, 1) = 1.0;
  wgls::SolverStats stats;
  EXPECT_THROW(wgls::cholesky_solve(indefinite, Eigen::Vector2d(1, 0), 10, stats), wgls::SolverError);
  EXPECT_THROW(wgls::cholesky_solve(indefinite, Eigen::Vector2d(1, 0), 0, stats), wgls::SolverError);

  wgls::SparseMatrix lap(20, 20);
  for (int i = 0; i < 20; ++i) {
    lap.insert(i, i) = 2.0;
    if (i > 0) lap.insert(i, i - 1) = -1.0;
    if (i < 19) lap.insert(i, i + 1) = -1.0;
  }
  try {
    (void)wgls::conjugate_gradient(lap, Eigen::VectorXd::Ones(20), 1e-14, 3, stats);
    FAIL() << "expected SolverError";
  } catch (const wgls::SolverError& e) {
    EXPECT_EQ(e.residual_history().size(), 3u);
    EXPECT_NE(std::string(e.what()).find("not SPD / ill-conditioned"), std::string::npos);
  }

  wgls::LinearSystem empty;
  EXPECT_THROW(wgls::solve(empty), wgls::SolverError);
}

TEST(Solve, ZeroDataGivesZero) {
  for (int k = 1; k <= 3; ++k) {
    const auto res = wgls::check_zero_data(wgls::generate_nonconvex_polygonal(2), k, k + 2);
    EXPECT_TRUE(res.passed()) << res.value;
  }
}

TEST(ErrorEquation, UnitCoefficients) {
  Fixture fx(wgls::generate_triangular(3), 2, 2);
  const auto coeffs = polynomial_data(Point(1.0, 1.0), 1.0, wgls::random_polynomial(4, 21));
  const auto sys = build(fx, coeffs);
  const auto sol = wgls::solve(sys);
  const auto rep = wgls::verify_error_equation(sys, wgls::WeakFunction(fx.space, sol.coefficients),
                                               wgls::project_Qh(coeffs.g, fx.space));
  EXPECT_LT(rep.relative(), 1e-10);
}

TEST(ErrorEquation, RandomConstantCoefficients) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Fixture fx(wgls::generate_triangular(2), 2, 2);
  for (int draw = 0; draw < 20; ++draw) {
    Point beta(u(rng), u(rng));
    const double c = u(rng);
    const auto coeffs = polynomial_data(beta, c, wgls::random_polynomial(4, 100 + draw));
    const auto sys = build(fx, coeffs);
    const auto sol = wgls::solve(sys);
    const auto rep = wgls::verify_error_equation(sys, wgls::WeakFunction(fx.space, sol.coefficients),
                                                 wgls::project_Qh(coeffs.g, fx.space));
    EXPECT_LT(rep.relative(), 1e-9) << "draw " << draw << " beta " << beta.transpose() << " c " << c;
  }
}

TEST(ErrorEquation, NeedsStoredParts) {
  Fixture fx(wgls::generate_triangular(1), 1, 1);
  const auto coeffs = wgls::make_problem("sin").coefficients();
  const auto sys = build(fx, coeffs, false);
  const auto sol = wgls::solve(sys);
  EXPECT_THROW(wgls::verify_error_equation(sys, wgls::WeakFunction(fx.space, sol.coefficients),
                                           wgls::project_Qh(coeffs.g, fx.space)),
               wgls::ConfigError);
}

} // namespace
