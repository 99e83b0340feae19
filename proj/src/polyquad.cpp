#include "wgls/polyquad.hpp"

#include "wgls/error.hpp"

#include <Eigen/Cholesky>

#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

namespace wgls {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool point_in_closed_triangle(const Point& p, const Point& a, const Point& b, const Point& c,
                              double tol) {
  return cross(b - a, p - a) >= -tol && cross(c - b, p - b) >= -tol && cross(a - c, p - c) >= -tol;
}

std::vector<Triangle> ear_clip(const std::vector<Point>& polygon) {
  std::vector<std::size_t> remaining(polygon.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

  double scale = 0.0;
  for (const auto& p : polygon) scale = std::max(scale, (p - polygon.front()).norm());
  const double tol = 1e-14 * scale * scale;

  std::vector<Triangle> out;
  while (remaining.size() > 3) {
    const std::size_t n = remaining.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Point& prev = polygon[remaining[(i + n - 1) % n]];
      const Point& cur = polygon[remaining[i]];
      const Point& next = polygon[remaining[(i + 1) % n]];
      if (cross(cur - prev, next - cur) <= tol) continue; // reflex or straight
      bool blocked = false;
      for (std::size_t j = 0; j < n && !blocked; ++j) {
        if (j == i || j == (i + 1) % n || j == (i + n - 1) % n) continue;
        blocked = point_in_closed_triangle(polygon[remaining[j]], prev, cur, next, tol);
      }
      if (blocked) continue;
      out.push_back({prev, cur, next});
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw GeometryError("ear clipping found no ear; polygon is not simple");
  }
  out.push_back({polygon[remaining[0]], polygon[remaining[1]], polygon[remaining[2]]});
  return out;
}

} // namespace

double QuadratureRule::measure() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

void QuadratureRule::append(const QuadratureRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

GaussLegendre gauss_legendre(int n_points) {
  if (n_points < 1) throw ConfigError("Gauss-Legendre rule needs at least one point");
  const auto n = static_cast<std::size_t>(n_points);
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      // P_n(x) = p1, P_{n-1}(x) = p0
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int degree) {
  const double twice_area = cross(b - a, c - a);
  const double scale = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  if (!(std::abs(twice_area) > 1e-14 * scale * scale))
    throw GeometryError("degenerate (zero-area) triangle in quadrature construction");

  // Degree q in (xi, eta) becomes degree q + 1 in u after the collapse.
  const int n = std::max(1, (degree + 3) / 2);
  const GaussLegendre gl = gauss_legendre(n);
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(static_cast<std::size_t>(n * n));
  rule.weights.reserve(static_cast<std::size_t>(n * n));
  const double jac = std::abs(twice_area);
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (gl.nodes[i] + 1.0);
    const double wu = 0.5 * gl.weights[i];
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (gl.nodes[j] + 1.0);
      const double wv = 0.5 * gl.weights[j];
      const double xi = u;
      const double eta = (1.0 - u) * v;
      rule.points.push_back(a + xi * (b - a) + eta * (c - a));
      rule.weights.push_back(wu * wv * (1.0 - u) * jac);
    }
  }
  return rule;
}

std::vector<Triangle> triangulate(const std::vector<Point>& polygon) {
  if (polygon.size() < 3) throw GeometryError("polygon with fewer than three vertices");
  if (polygon.size() == 3) return {Triangle{polygon[0], polygon[1], polygon[2]}};
  if (!is_convex(polygon)) return ear_clip(polygon);

  const double area = signed_area(polygon);
  Point centroid = Point::Zero();
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % n];
    centroid += (p + q) * cross(p, q);
  }
  centroid /= 6.0 * area;
  std::vector<Triangle> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({centroid, polygon[i], polygon[(i + 1) % n]});
  return out;
}

QuadratureRule cell_quadrature(const PolyMesh& mesh, const Cell& cell, int degree) {
  if (degree < 0) throw ConfigError("quadrature degree must be >= 0");
  QuadratureRule rule;
  rule.degree = degree;
  for (const auto& t : triangulate(mesh.cell_polygon(cell.id)))
    rule.append(triangle_quadrature(t[0], t[1], t[2], degree));
  return rule;
}

QuadratureRule facet_quadrature(const PolyMesh& mesh, const Facet& facet, int degree) {
  if (degree < 0) throw ConfigError("quadrature degree must be >= 0");
  const int n = std::max(1, (degree + 2) / 2); // ceil((q + 1) / 2)
  const GaussLegendre gl = gauss_legendre(n);
  const Point& a = mesh.vertex(facet.vertex_ids[0]);
  const Point& b = mesh.vertex(facet.vertex_ids[1]);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (a + b) + 0.5 * gl.nodes[i] * (b - a));
    rule.weights.push_back(0.5 * gl.weights[i] * facet.length);
  }
  return rule;
}

CellBasis::CellBasis(const Cell& cell, int degree) : CellBasis(cell.centroid, cell.diameter, degree) {}

CellBasis::CellBasis(const Point& center, double scale, int degree)
    : center_(center), scale_(scale), degree_(degree) {
  if (degree < 0) throw ConfigError("basis degree must be >= 0");
  for (int p = 0; p <= degree; ++p)
    for (int j = 0; j <= p; ++j) exponents_.emplace_back(p - j, j);
}

Eigen::MatrixXd CellBasis::values(std::span<const Point> points) const {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd out(n, dim());
  std::vector<double> px(static_cast<std::size_t>(degree_) + 1);
  std::vector<double> py(static_cast<std::size_t>(degree_) + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (points[static_cast<std::size_t>(i)].x() - center_.x()) / scale_;
    const double y = (points[static_cast<std::size_t>(i)].y() - center_.y()) / scale_;
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= degree_; ++d) {
      px[static_cast<std::size_t>(d)] = px[static_cast<std::size_t>(d) - 1] * x;
      py[static_cast<std::size_t>(d)] = py[static_cast<std::size_t>(d) - 1] * y;
    }
    for (std::size_t j = 0; j < exponents_.size(); ++j) {
      const auto [a, b] = exponents_[j];
      out(i, static_cast<Eigen::Index>(j)) = px[static_cast<std::size_t>(a)] * py[static_cast<std::size_t>(b)];
    }
  }
  if (orthonormal()) return out * transform_.transpose();
  return out;
}

std::array<Eigen::MatrixXd, 2> CellBasis::gradients(std::span<const Point> points) const {
  const auto n = static_cast<Eigen::Index>(points.size());
  std::array<Eigen::MatrixXd, 2> out{Eigen::MatrixXd(n, dim()), Eigen::MatrixXd(n, dim())};
  std::vector<double> px(static_cast<std::size_t>(degree_) + 1);
  std::vector<double> py(static_cast<std::size_t>(degree_) + 1);
  const double inv_h = 1.0 / scale_;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (points[static_cast<std::size_t>(i)].x() - center_.x()) * inv_h;
    const double y = (points[static_cast<std::size_t>(i)].y() - center_.y()) * inv_h;
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= degree_; ++d) {
      px[static_cast<std::size_t>(d)] = px[static_cast<std::size_t>(d) - 1] * x;
      py[static_cast<std::size_t>(d)] = py[static_cast<std::size_t>(d) - 1] * y;
    }
    for (std::size_t j = 0; j < exponents_.size(); ++j) {
      const auto [a, b] = exponents_[j];
      const auto ua = static_cast<std::size_t>(a);
      const auto ub = static_cast<std::size_t>(b);
      const auto col = static_cast<Eigen::Index>(j);
      out[0](i, col) = a > 0 ? a * px[ua - 1] * py[ub] * inv_h : 0.0;
      out[1](i, col) = b > 0 ? b * px[ua] * py[ub - 1] * inv_h : 0.0;
    }
  }
  if (orthonormal()) {
    out[0] = out[0] * transform_.transpose();
    out[1] = out[1] * transform_.transpose();
  }
  return out;
}

void CellBasis::orthonormalize(const QuadratureRule& rule) {
  transform_.resize(0, 0);
  const Eigen::MatrixXd m = mass_matrix(values(rule.points), rule);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw GeometryError("cell basis mass matrix is not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();
  transform_ = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(dim(), dim()));
}

FacetBasis::FacetBasis(const PolyMesh& mesh, const Facet& facet, int degree)
    : origin_(facet.midpoint), degree_(degree) {
  if (degree < 0) throw ConfigError("basis degree must be >= 0");
  const Point tangent = mesh.vertex(facet.vertex_ids[1]) - mesh.vertex(facet.vertex_ids[0]);
  direction_ = tangent * (2.0 / (facet.length * facet.length));
}

double FacetBasis::coordinate(const Point& p) const { return (p - origin_).dot(direction_); }

Eigen::MatrixXd FacetBasis::values(std::span<const Point> points) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), dim());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double s = coordinate(points[i]);
    double v = 1.0;
    for (int j = 0; j <= degree_; ++j) {
      out(static_cast<Eigen::Index>(i), j) = v;
      v *= s;
    }
  }
  return out;
}

Eigen::MatrixXd mass_matrix(const Eigen::MatrixXd& values, const QuadratureRule& rule) {
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
  Eigen::MatrixXd m = values.transpose() * w.asDiagonal() * values;
  // Exact symmetry.
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd mass_matrix(const CellBasis& basis, const QuadratureRule& rule) {
  assert(rule.degree >= 2 * basis.degree() && "quadrature not exact for the mass matrix");
  return mass_matrix(basis.values(rule.points), rule);
}

Eigen::MatrixXd mass_matrix(const FacetBasis& basis, const QuadratureRule& rule) {
  assert(rule.degree >= 2 * basis.degree() && "quadrature not exact for the mass matrix");
  return mass_matrix(basis.values(rule.points), rule);
}

} // namespace wgls
