#pragma once

#include "wgls/fields.hpp"
#include "wgls/polymesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace wgls {

/// Points and positive weights integrating every polynomial of total degree <= degree exactly.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] double measure() const;
  void append(const QuadratureRule& other);

  /// Sum of w_i f(x_i).
  template <class F>
  [[nodiscard]] double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) sum += weights[i] * f(points[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n_points);

/// Collapsed (Duffy) tensor Gauss rule of exactness >= degree on the triangle abc.
/// Throws GeometryError for a degenerate triangle.
QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int degree);

using Triangle = std::array<Point, 3>;

/// Triangles covering a simple counterclockwise polygon: the polygon itself for triangles, a
/// centroid fan for convex polygons, ear clipping otherwise (lowest-index ear first).
std::vector<Triangle> triangulate(const std::vector<Point>& polygon);

QuadratureRule cell_quadrature(const PolyMesh& mesh, const Cell& cell, int degree);
QuadratureRule facet_quadrature(const PolyMesh& mesh, const Facet& facet, int degree);

/// Dimension of P_r in two variables.
constexpr int poly_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Scaled monomials ((x - x_T)/h_T)^a ((y - y_T)/h_T)^b with a + b <= degree, ordered by
/// total degree, then by decreasing a. Optionally orthonormalized by a lower-triangular
/// transform, which keeps the leading poly_dim(k) functions a basis of P_k.
class CellBasis {
public:
  CellBasis(const Cell& cell, int degree);
  CellBasis(const Point& center, double scale, int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int dim() const { return poly_dim(degree_); }
  [[nodiscard]] const Point& center() const { return center_; }
  [[nodiscard]] double scale() const { return scale_; }
  [[nodiscard]] const std::vector<std::pair<int, int>>& exponents() const { return exponents_; }
  [[nodiscard]] bool orthonormal() const { return transform_.size() > 0; }

  /// values(i, j) = phi_j(points[i]).
  [[nodiscard]] Eigen::MatrixXd values(std::span<const Point> points) const;
  /// {d/dx, d/dy}, each laid out like values(); includes the 1/h_T chain-rule factor.
  [[nodiscard]] std::array<Eigen::MatrixXd, 2> gradients(std::span<const Point> points) const;

  /// Replaces the basis by its Gram-Schmidt orthonormalization with respect to the rule.
  void orthonormalize(const QuadratureRule& rule);

private:
  Point center_;
  double scale_;
  int degree_;
  std::vector<std::pair<int, int>> exponents_;
  Eigen::MatrixXd transform_; // empty: plain monomials; else phi~_i = sum_j C(i,j) phi_j
};

/// Monomials s^j, j <= degree, in the facet arc-length coordinate s in [-1, 1] running from
/// the lower to the higher vertex id.
class FacetBasis {
public:
  FacetBasis(const PolyMesh& mesh, const Facet& facet, int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int dim() const { return degree_ + 1; }
  [[nodiscard]] double coordinate(const Point& p) const;
  [[nodiscard]] Eigen::MatrixXd values(std::span<const Point> points) const;

private:
  Point origin_;
  Point direction_; // unit tangent scaled by 2 / length
  int degree_;
};

/// M = V^T W V for basis values V at the rule points.
Eigen::MatrixXd mass_matrix(const Eigen::MatrixXd& values, const QuadratureRule& rule);
Eigen::MatrixXd mass_matrix(const CellBasis& basis, const QuadratureRule& rule);
Eigen::MatrixXd mass_matrix(const FacetBasis& basis, const QuadratureRule& rule);

} // namespace wgls
