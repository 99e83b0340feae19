#pragma once

#include "wgls/fields.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

namespace wgls {

inline constexpr std::size_t kInvalidIndex = std::numeric_limits<std::size_t>::max();

/// Axis-aligned rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Point lo{-1.0, -1.0};
  Point hi{1.0, 1.0};

  [[nodiscard]] double area() const { return (hi.x() - lo.x()) * (hi.y() - lo.y()); }
};

/// An edge of the mesh. vertex_ids are stored in ascending order; the facet's own
/// arc-length coordinate runs from vertex_ids[0] to vertex_ids[1].
struct Facet {
  std::size_t id = kInvalidIndex;
  std::array<std::size_t, 2> vertex_ids{kInvalidIndex, kInvalidIndex};
  std::array<std::size_t, 2> cell_ids{kInvalidIndex, kInvalidIndex};
  std::array<Point, 2> normals{Point::Zero(), Point::Zero()}; // outward normal of cell_ids[i]
  double length = 0.0;
  Point midpoint = Point::Zero();

  [[nodiscard]] bool is_boundary() const { return cell_ids[1] == kInvalidIndex; }
  [[nodiscard]] std::size_t n_cells() const { return is_boundary() ? 1 : 2; }

  /// Outward unit normal of the given adjacent cell.
  [[nodiscard]] const Point& normal(std::size_t cell) const;
};

/// A simple polygon, stored counterclockwise. facet_ids[i] is the edge from
/// vertex_ids[i] to vertex_ids[i+1].
struct Cell {
  std::size_t id = kInvalidIndex;
  std::vector<std::size_t> vertex_ids;
  std::vector<std::size_t> facet_ids;
  double area = 0.0;
  double diameter = 0.0;
  Point centroid = Point::Zero();
};

/// Immutable 2D polygonal mesh. Facets and boundary information are derived from the
/// vertex loops at construction.
class PolyMesh {
public:
  /// Builds the mesh from vertex coordinates and per-cell vertex loops (either orientation;
  /// loops are normalized to counterclockwise). Throws ValidationError on inconsistent input.
  PolyMesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> cell_loops);

  [[nodiscard]] static constexpr int dimension() { return 2; }

  [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<Facet>& facets() const { return facets_; }
  [[nodiscard]] const std::vector<Cell>& cells() const { return cells_; }
  [[nodiscard]] const Point& vertex(std::size_t i) const { return vertices_.at(i); }
  [[nodiscard]] const Facet& facet(std::size_t i) const { return facets_.at(i); }
  [[nodiscard]] const Cell& cell(std::size_t i) const { return cells_.at(i); }

  [[nodiscard]] std::size_t n_vertices() const { return vertices_.size(); }
  [[nodiscard]] std::size_t n_facets() const { return facets_.size(); }
  [[nodiscard]] std::size_t n_cells() const { return cells_.size(); }

  /// h = max over cells of the cell diameter.
  [[nodiscard]] double mesh_size() const { return mesh_size_; }
  [[nodiscard]] const std::vector<std::size_t>& boundary_facets() const { return boundary_facets_; }
  [[nodiscard]] double total_area() const;

  /// Vertex coordinates of a cell in loop order.
  [[nodiscard]] std::vector<Point> cell_polygon(std::size_t cell) const;

private:
  std::vector<Point> vertices_;
  std::vector<Facet> facets_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> boundary_facets_;
  double mesh_size_ = 0.0;
};

struct BoundaryClassification {
  std::vector<std::size_t> inflow_facets;
  std::vector<std::size_t> nonin_facets;

  [[nodiscard]] bool is_inflow(std::size_t facet) const;
};

/// Relative tolerance below which beta.n counts as characteristic (no data imposed).
inline constexpr double kCharacteristicTolerance = 1e-12;

/// Splits the boundary facets by the sign of beta(midpoint).n. A facet is inflow iff
/// beta.n < -1e-12 * max|beta|, the maximum taken over the boundary midpoints.
BoundaryClassification classify_boundary(const PolyMesh& mesh, const VectorField& beta);

/// Uniform grid of 2^level x 2^level squares, each split along its lower-left to
/// upper-right diagonal.
PolyMesh generate_triangular(int level, const Box& box = Box{});

/// Grid of 2^level x 2^level squares (level >= 1), each split into an L-shaped octagon
/// covering three quadrants (with its edge midpoints as vertices, so neighbours conform)
/// and a small square in the upper-right quadrant.
PolyMesh generate_nonconvex_polygonal(int level, const Box& box = Box{});

/// True if no interior angle exceeds pi (collinear vertices are allowed).
bool is_convex(const std::vector<Point>& polygon);

/// Signed shoelace area, positive for counterclockwise loops.
double signed_area(const std::vector<Point>& polygon);

/// Text format: "polymesh 2", "vertices N", N lines "x y", "cells M", M lines "n v0 ... v{n-1}".
PolyMesh read_mesh(std::istream& in);
void write_mesh(const PolyMesh& mesh, std::ostream& out);
PolyMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const PolyMesh& mesh, const std::filesystem::path& path);

} // namespace wgls
