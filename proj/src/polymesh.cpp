#include "wgls/polymesh.hpp"

#include "wgls/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace wgls {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

// Orientation of c relative to the directed line a->b, with a relative zero band.
int orientation(const Point& a, const Point& b, const Point& c, double scale) {
  const double v = cross(b - a, c - a);
  const double tol = 1e-14 * scale * scale;
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2,
                        double scale) {
  const int o1 = orientation(p1, p2, q1, scale);
  const int o2 = orientation(p1, p2, q2, scale);
  const int o3 = orientation(q1, q2, p1, scale);
  const int o4 = orientation(q1, q2, p2, scale);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

bool is_simple(const std::vector<Point>& poly) {
  const std::size_t n = poly.size();
  double scale = 0.0;
  for (const auto& p : poly)
    for (const auto& q : poly) scale = std::max(scale, (p - q).norm());
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point& c = poly[j];
      const Point& d = poly[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Neighbouring edges share one endpoint; they must not fold back onto each other.
        const Point& shared = (j == i + 1) ? b : a;
        const Point& other_i = (j == i + 1) ? a : b;
        const Point& other_j = (j == i + 1) ? d : c;
        const Point u = other_i - shared;
        const Point v = other_j - shared;
        if (std::abs(cross(u, v)) <= 1e-14 * scale * scale && u.dot(v) > 0.0) return false;
        continue;
      }
      if (segments_intersect(a, b, c, d, scale)) return false;
    }
  }
  return true;
}

} // namespace

const Point& Facet::normal(std::size_t cell) const {
  if (cell_ids[0] == cell) return normals[0];
  if (cell_ids[1] == cell) return normals[1];
  throw ValidationError("facet " + std::to_string(id) + " is not adjacent to cell " +
                        std::to_string(cell));
}

double signed_area(const std::vector<Point>& polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

bool is_convex(const std::vector<Point>& polygon) {
  const std::size_t n = polygon.size();
  const double orient = signed_area(polygon) >= 0.0 ? 1.0 : -1.0;
  double scale = 0.0;
  for (const auto& p : polygon) scale = std::max(scale, (p - polygon.front()).norm());
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = polygon[(i + n - 1) % n];
    const Point& cur = polygon[i];
    const Point& next = polygon[(i + 1) % n];
    if (orient * cross(cur - prev, next - cur) < -1e-14 * scale * scale) return false;
  }
  return true;
}

PolyMesh::PolyMesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> cell_loops)
    : vertices_(std::move(vertices)) {
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (!std::isfinite(vertices_[v].x()) || !std::isfinite(vertices_[v].y()))
      throw ValidationError("vertex " + std::to_string(v) + " has non-finite coordinates");
  }
  if (cell_loops.empty()) throw ValidationError("mesh has no cells");

  cells_.resize(cell_loops.size());
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_to_facet;

  for (std::size_t c = 0; c < cell_loops.size(); ++c) {
    auto& loop = cell_loops[c];
    const std::string where = "cell " + std::to_string(c);
    if (loop.size() < 3) throw ValidationError(where + " has fewer than 3 vertices");
    for (std::size_t v : loop) {
      if (v >= vertices_.size())
        throw ValidationError(where + " references missing vertex " + std::to_string(v));
    }
    {
      auto sorted = loop;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError(where + " repeats a vertex");
    }

    std::vector<Point> poly;
    poly.reserve(loop.size());
    for (std::size_t v : loop) poly.push_back(vertices_[v]);
    double area = signed_area(poly);
    if (area < 0.0) {
      std::reverse(loop.begin(), loop.end());
      std::reverse(poly.begin(), poly.end());
      area = -area;
    }
    if (!(area > 0.0)) throw ValidationError(where + " has zero area");
    if (!is_simple(poly)) throw ValidationError(where + " is not a simple polygon");

    Cell& cell = cells_[c];
    cell.id = c;
    cell.vertex_ids = loop;
    cell.area = area;

    // Area centroid.
    Point centroid = Point::Zero();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = poly[i];
      const Point& b = poly[(i + 1) % n];
      centroid += (a + b) * cross(a, b);
    }
    cell.centroid = centroid / (6.0 * area);

    double diameter = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) diameter = std::max(diameter, (poly[i] - poly[j]).norm());
    cell.diameter = diameter;
    mesh_size_ = std::max(mesh_size_, diameter);

    cell.facet_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = loop[i];
      const std::size_t b = loop[(i + 1) % n];
      const auto key = std::minmax(a, b);
      const Point tangent = vertices_[b] - vertices_[a];
      const double length = tangent.norm();
      const Point outward = Point(tangent.y(), -tangent.x()) / length;

      auto [it, inserted] = edge_to_facet.try_emplace({key.first, key.second}, facets_.size());
      if (inserted) {
        Facet f;
        f.id = facets_.size();
        f.vertex_ids = {key.first, key.second};
        f.cell_ids[0] = c;
        f.normals[0] = outward;
        f.length = length;
        f.midpoint = 0.5 * (vertices_[a] + vertices_[b]);
        facets_.push_back(f);
      } else {
        Facet& f = facets_[it->second];
        if (!f.is_boundary())
          throw ValidationError("edge (" + std::to_string(key.first) + ", " +
                                std::to_string(key.second) + ") is shared by more than two cells");
        if (f.cell_ids[0] == c) throw ValidationError(where + " uses an edge twice");
        if ((f.normals[0] + outward).norm() > 1e-12)
          throw ValidationError("cells " + std::to_string(f.cell_ids[0]) + " and " + std::to_string(c) +
                                " overlap along a shared edge");
        f.cell_ids[1] = c;
        // Exact negation keeps the pair consistent to the last bit.
        f.normals[1] = -f.normals[0];
      }
      cell.facet_ids[i] = it->second;
    }
  }

  for (const auto& f : facets_)
    if (f.is_boundary()) boundary_facets_.push_back(f.id);
}

double PolyMesh::total_area() const {
  double sum = 0.0;
  for (const auto& c : cells_) sum += c.area;
  return sum;
}

std::vector<Point> PolyMesh::cell_polygon(std::size_t cell) const {
  const auto& ids = cells_.at(cell).vertex_ids;
  std::vector<Point> poly;
  poly.reserve(ids.size());
  for (std::size_t v : ids) poly.push_back(vertices_[v]);
  return poly;
}

bool BoundaryClassification::is_inflow(std::size_t facet) const {
  return std::binary_search(inflow_facets.begin(), inflow_facets.end(), facet);
}

BoundaryClassification classify_boundary(const PolyMesh& mesh, const VectorField& beta) {
  std::vector<Point> samples;
  samples.reserve(mesh.boundary_facets().size());
  double beta_max = 0.0;
  for (std::size_t f : mesh.boundary_facets()) {
    samples.push_back(beta(mesh.facet(f).midpoint));
    beta_max = std::max({beta_max, std::abs(samples.back().x()), std::abs(samples.back().y())});
  }
  const double eps = kCharacteristicTolerance * beta_max;

  BoundaryClassification out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Facet& f = mesh.facet(mesh.boundary_facets()[i]);
    const double flux = samples[i].dot(f.normals[0]);
    if (flux < -eps)
      out.inflow_facets.push_back(f.id);
    else
      out.nonin_facets.push_back(f.id);
  }
  return out;
}

PolyMesh generate_triangular(int level, const Box& box) {
  if (level < 0) throw ConfigError("triangular mesh level must be >= 0");
  const std::size_t n = std::size_t{1} << level;
  const std::size_t stride = n + 1;
  std::vector<Point> vertices;
  vertices.reserve(stride * stride);
  const double dx = box.hi.x() - box.lo.x();
  const double dy = box.hi.y() - box.lo.y();
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i <= n; ++i)
      vertices.emplace_back(box.lo.x() + dx * static_cast<double>(i) / static_cast<double>(n),
                            box.lo.y() + dy * static_cast<double>(j) / static_cast<double>(n));

  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = j * stride + i;
      const std::size_t b = a + 1;
      const std::size_t c = a + stride + 1;
      const std::size_t d = a + stride;
      cells.push_back({a, b, c});
      cells.push_back({a, c, d});
    }
  }
  return PolyMesh(std::move(vertices), std::move(cells));
}

PolyMesh generate_nonconvex_polygonal(int level, const Box& box) {
  if (level < 1) throw ConfigError("nonconvex polygonal mesh level must be >= 1");
  const std::size_t n = std::size_t{1} << level;
  const std::size_t fine = 2 * n;
  const std::size_t stride = fine + 1;
  std::vector<Point> vertices;
  vertices.reserve(stride * stride);
  const double dx = box.hi.x() - box.lo.x();
  const double dy = box.hi.y() - box.lo.y();
  for (std::size_t j = 0; j <= fine; ++j)
    for (std::size_t i = 0; i <= fine; ++i)
      vertices.emplace_back(box.lo.x() + dx * static_cast<double>(i) / static_cast<double>(fine),
                            box.lo.y() + dy * static_cast<double>(j) / static_cast<double>(fine));

  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      auto p = [&](std::size_t a, std::size_t b) { return (2 * j + b) * stride + 2 * i + a; };
      cells.push_back({p(0, 0), p(1, 0), p(2, 0), p(2, 1), p(1, 1), p(1, 2), p(0, 2), p(0, 1)});
      cells.push_back({p(1, 1), p(2, 1), p(2, 2), p(1, 2)});
    }
  }
  return PolyMesh(std::move(vertices), std::move(cells));
}

} // namespace wgls
