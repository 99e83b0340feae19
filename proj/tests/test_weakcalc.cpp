#include "wgls/error.hpp"
#include "wgls/polymesh.hpp"
#include "wgls/verify.hpp"
#include "wgls/weakcalc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using wgls::Point;

wgls::PolyMesh single_cell(const std::vector<Point>& polygon) {
  std::vector<std::size_t> loop(polygon.size());
  for (std::size_t i = 0; i < loop.size(); ++i) loop[i] = i;
  return wgls::PolyMesh(polygon, {loop});
}

double l2_on_cell(const wgls::WeakSpace& space, std::size_t cell, const Eigen::VectorXd& coeffs,
                  const wgls::ScalarField& f) {
  const auto rule = space.cell_rule(cell);
  const Eigen::VectorXd v = space.local(cell).interior.values(rule.points) * coeffs;
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double d = v(Eigen::Index(i)) - f(rule.points[i]);
    s += rule.weights[i] * d * d;
  }
  return s;
}

TEST(WeakGradient, HypotenuseTraceOnReferenceTriangle) {
  // v_0 = 0, v_b = 1 on the hypotenuse only. With r = 0 the weak gradient is
  // |T|^{-1} int_e n ds = 2 (1, 1).
  const auto mesh = single_cell({{0, 0}, {1, 0}, {0, 1}});
  const wgls::WeakSpace space(mesh, 1, 0);
  const wgls::WeakGradientOperator grad(space);
  wgls::WeakFunction v(space);
  for (const auto& f : mesh.facets()) {
    if (std::abs(f.midpoint.x() - 0.5) < 1e-14 && std::abs(f.midpoint.y() - 0.5) < 1e-14) {
      v.coefficients.segment(Eigen::Index(space.facet_dof_offset(f.id)), 2) =
          wgls::project_Qb(wgls::constant_field(1.0), space, f.id);
    }
  }
  const Eigen::VectorXd g = grad.apply(v, 0);
  ASSERT_EQ(g.size(), 2);
  EXPECT_NEAR(g(0), 2.0, 1e-13);
  EXPECT_NEAR(g(1), 2.0, 1e-13);
}

TEST(WeakGradient, ZeroFunctionHasZeroGradient) {
  const auto mesh = wgls::generate_nonconvex_polygonal(1);
  const wgls::WeakSpace space(mesh, 2, 4);
  const wgls::WeakGradientOperator grad(space);
  const wgls::WeakFunction v(space);
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) EXPECT_EQ(grad.apply(v, c).cwiseAbs().maxCoeff(), 0.0);
}

TEST(WeakGradient, ProjectionOfLinearFunction) {
  const auto mesh = wgls::generate_triangular(2);
  const wgls::WeakSpace space(mesh, 1, 2);
  const wgls::WeakGradientOperator grad(space);
  const auto qx = wgls::project_Qh([](const Point& p) { return p.x() + 3.0; }, space);
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::VectorXd g = grad.apply(qx, c);
    const auto& op = grad[c];
    const std::vector<Point> probe = {mesh.cell(c).centroid, mesh.vertex(mesh.cell(c).vertex_ids[0])};
    const Eigen::MatrixXd vals = op.basis.values(probe);
    const Eigen::Index m = op.basis.dim();
    const Eigen::VectorXd gx = vals * g.head(m);
    const Eigen::VectorXd gy = vals * g.tail(m);
    for (Eigen::Index i = 0; i < gx.size(); ++i) {
      EXPECT_NEAR(gx(i), 1.0, 1e-12);
      EXPECT_NEAR(gy(i), 0.0, 1e-12);
    }
  }
}

TEST(WeakGradient, DefiningEquationsHold) {
  for (int k = 1; k <= 4; ++k) {
    const auto mesh = wgls::generate_nonconvex_polygonal(1);
    const wgls::WeakSpace space(mesh, k, k + 2);
    const wgls::WeakGradientOperator grad(space);
    EXPECT_LT(grad.max_residual(), 1e-12) << "k " << k;
  }
}

TEST(Commutativity, PolynomialsOfDegreeKForAnyR) {
  const auto tri = wgls::generate_triangular(2);
  const auto poly = wgls::generate_nonconvex_polygonal(2);
  for (int k = 1; k <= 4; ++k) {
    for (int r = k; r <= k + 2; ++r) {
      for (const auto* mesh : {&tri, &poly}) {
        const auto res = wgls::check_commutativity(*mesh, k, r, 31 * k + r);
        EXPECT_TRUE(res.passed()) << "k " << k << " r " << r << " value " << res.value;
      }
    }
  }
}

TEST(Commutativity, LinearFunctionExactly) {
  const auto mesh = wgls::generate_nonconvex_polygonal(2);
  const wgls::WeakSpace space(mesh, 1, 3);
  const wgls::WeakGradientOperator grad(space);
  const auto rep = wgls::verify_commutativity(
      grad, [](const Point& p) { return p.x() + 2.0 * p.y(); }, wgls::constant_field(Point(1.0, 2.0)));
  EXPECT_LT(rep.relative(), 1e-12);
}

TEST(Commutativity, SmoothFunctionWhenRIsKUpToQuadrature) {
  // With r = k the identity holds for any smooth w; the only defect left is the quadrature
  // error in the projections, which vanishes as the rules are refined.
  const auto mesh = wgls::generate_triangular(3);
  for (int k = 1; k <= 3; ++k) {
    wgls::SpaceOptions fine;
    fine.extra_quadrature = 12;
    const wgls::WeakSpace space(mesh, k, k, fine);
    const wgls::WeakGradientOperator grad(space);
    const auto rep = wgls::verify_commutativity(
        grad, [](const Point& p) { return std::sin(p.x()) * std::sin(p.y()); },
        [](const Point& p) {
          return Point(std::cos(p.x()) * std::sin(p.y()), std::sin(p.x()) * std::cos(p.y()));
        });
    EXPECT_LT(rep.relative(), 1e-10) << "k " << k;
  }
}

TEST(WeakGradient, ConsistentWithStrongGradientWhenTracesAgree) {
  // A polynomial of degree k with matching traces: the weak gradient is the classical one
  // whenever r >= k - 1.
  const auto mesh = wgls::generate_nonconvex_polygonal(1);
  for (int k = 1; k <= 3; ++k) {
    const auto p = wgls::random_polynomial(k, 500 + k);
    for (int r = std::max(0, k - 1); r <= k + 1; ++r) {
      const wgls::WeakSpace space(mesh, k, r);
      const wgls::WeakGradientOperator grad(space);
      const auto qh = wgls::project_Qh(p.field(), space);
      for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const Eigen::VectorXd g = grad.apply(qh, c);
        const auto& op = grad[c];
        const auto rule = space.cell_rule(c);
        const Eigen::MatrixXd vals = op.basis.values(rule.points);
        const Eigen::Index m = op.basis.dim();
        const Eigen::VectorXd gx = vals * g.head(m);
        const Eigen::VectorXd gy = vals * g.tail(m);
        for (std::size_t i = 0; i < rule.size(); ++i) {
          const Point exact = p.gradient(rule.points[i]);
          EXPECT_NEAR(gx(Eigen::Index(i)), exact.x(), 1e-10);
          EXPECT_NEAR(gy(Eigen::Index(i)), exact.y(), 1e-10);
        }
      }
    }
  }
}

TEST(WeakGradient, IsLinear) {
  const auto mesh = wgls::generate_nonconvex_polygonal(1);
  const wgls::WeakSpace space(mesh, 2, 4);
  const wgls::WeakGradientOperator grad(space);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd a(Eigen::Index(space.n_dofs()));
  Eigen::VectorXd b(Eigen::Index(space.n_dofs()));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a(i) = u(rng);
    b(i) = u(rng);
  }
  const double alpha = 1.7;
  const double beta = -0.4;
  const wgls::WeakFunction va(space, a);
  const wgls::WeakFunction vb(space, b);
  const wgls::WeakFunction vc(space, alpha * a + beta * b);
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::VectorXd lhs = grad.apply(vc, c);
    const Eigen::VectorXd rhs = alpha * grad.apply(va, c) + beta * grad.apply(vb, c);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST(Projection, InteriorOfXSquaredOnSquare) {
  const auto mesh = single_cell({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const wgls::WeakSpace space(mesh, 1, 1);
  const Eigen::VectorXd q = wgls::project_Q0([](const Point& p) { return p.x() * p.x(); }, space, 0);
  ASSERT_EQ(q.size(), 3);
  EXPECT_NEAR(q(0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(q(1), 0.0, 1e-14);
  EXPECT_NEAR(q(2), 0.0, 1e-14);
}

TEST(Projection, FacetOfSSquared) {
  const auto mesh = single_cell({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const wgls::WeakSpace space(mesh, 1, 1);
  for (const auto& f : mesh.facets()) {
    const wgls::FacetBasis basis(mesh, f, 1);
    const Eigen::VectorXd q =
        wgls::project_Qb([&](const Point& p) { return std::pow(basis.coordinate(p), 2); }, space, f.id);
    EXPECT_NEAR(q(0), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(q(1), 0.0, 1e-14);
  }
}

TEST(Projection, ResidualIsOrthogonalToPk) {
  const auto mesh = wgls::generate_nonconvex_polygonal(1);
  const wgls::WeakSpace space(mesh, 3, 3);
  const wgls::ScalarField f = [](const Point& p) { return std::exp(p.x()) * std::cos(2.0 * p.y()); };
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::VectorXd q = wgls::project_Q0(f, space, c);
    const auto rule = space.cell_rule(c);
    const Eigen::MatrixXd vals = space.local(c).interior.values(rule.points);
    const Eigen::VectorXd qv = vals * q;
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(vals.cols());
    for (std::size_t i = 0; i < rule.size(); ++i)
      moments += rule.weights[i] * (f(rule.points[i]) - qv(Eigen::Index(i))) * vals.row(Eigen::Index(i)).transpose();
    EXPECT_LT(moments.cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Projection, ReproducesPolynomialsAndTracesAgree) {
  const auto mesh = wgls::generate_triangular(2);
  const int k = 3;
  const wgls::WeakSpace space(mesh, k, k);
  const auto p = wgls::random_polynomial(k, 77);
  const auto qh = wgls::project_Qh(p.field(), space);
  for (std::size_t c = 0; c < mesh.n_cells(); ++c)
    EXPECT_LT(l2_on_cell(space, c, qh.interior(c), p.field()), 1e-26);
  for (const auto& f : mesh.facets()) {
    const auto rule = space.facet_rule(f.id);
    const Eigen::VectorXd vb = space.facet_basis(f.id).values(rule.points) * qh.facet(f.id);
    for (std::size_t i = 0; i < rule.size(); ++i) EXPECT_NEAR(vb(Eigen::Index(i)), p(rule.points[i]), 1e-12);
  }
}

TEST(Projection, ErrorDecaysAtOrderKPlusOne) {
  const int k = 2;
  const wgls::ScalarField u = [](const Point& p) { return std::sin(p.x()) * std::sin(p.y()); };
  double previous = 0.0;
  for (int level = 1; level <= 4; ++level) {
    const auto mesh = wgls::generate_triangular(level);
    const wgls::WeakSpace space(mesh, k, k);
    double s = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) s += l2_on_cell(space, c, wgls::project_Q0(u, space, c), u);
    const double err = std::sqrt(s);
    if (level > 1) EXPECT_NEAR(previous / err, 8.0, 0.8) << "level " << level;
    previous = err;
  }
}

TEST(WeakSpace, DofLayoutAndValidation) {
  const auto mesh = wgls::generate_triangular(1);
  const wgls::WeakSpace space(mesh, 2, 3);
  EXPECT_EQ(space.n_dofs(), mesh.n_cells() * 6 + mesh.n_facets() * 3);
  EXPECT_EQ(space.facet_dof_offset(0), mesh.n_cells() * 6);
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) EXPECT_EQ(space.local(c).n_local(), 6u + 3u * 3u);
  EXPECT_THROW(wgls::WeakSpace(mesh, 0, 1), wgls::ConfigError);
  EXPECT_THROW(wgls::WeakSpace(mesh, 1, -1), wgls::ConfigError);
  EXPECT_THROW(wgls::WeakFunction(space, Eigen::VectorXd::Zero(3)), wgls::ConfigError);
}

TEST(WeakSpace, OrthonormalizedBasesGiveSameGradient) {
  const auto mesh = wgls::generate_nonconvex_polygonal(1);
  wgls::SpaceOptions ortho;
  ortho.orthonormalize = true;
  const wgls::WeakSpace plain(mesh, 2, 4);
  const wgls::WeakSpace onb(mesh, 2, 4, ortho);
  const auto p = wgls::random_polynomial(2, 9);
  const auto rp = wgls::verify_commutativity(wgls::WeakGradientOperator(plain), p.field(), p.gradient_field());
  const auto ro = wgls::verify_commutativity(wgls::WeakGradientOperator(onb), p.field(), p.gradient_field());
  EXPECT_LT(rp.relative(), 1e-11);
  EXPECT_LT(ro.relative(), 1e-11);
  EXPECT_NEAR(rp.max_reference, ro.max_reference, 1e-10 * rp.max_reference);
}

} // namespace
