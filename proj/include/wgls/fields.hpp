#pragma once

#include <Eigen/Core>

#include <functional>

namespace wgls {

using Point = Eigen::Vector2d;

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

inline ScalarField constant_field(double value) {
  return [value](const Point&) { return value; };
}

inline VectorField constant_field(const Point& value) {
  return [value](const Point&) { return value; };
}

} // namespace wgls
