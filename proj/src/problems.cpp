#include "wgls/convergence.hpp"
#include "wgls/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wgls {

namespace {

const Point kDiagonal{1.0, 1.0};

ScalarField shifted_bilinear(double lambda) {
  return [lambda](const Point& p) { return lambda * (p.x() - 0.5) * (p.y() - 0.5); };
}

} // namespace

std::vector<std::string> problem_names() { return {"sin", "patch-linear", "patch-quadratic", "zero"}; }

ProblemSpec make_problem(const std::string& name, double lambda) {
  ProblemSpec p;
  p.name = name;
  p.beta = constant_field(kDiagonal);
  if (name == "sin") {
    p.parameters["lambda"] = lambda;
    p.u = [](const Point& x) { return std::sin(x.x()) * std::sin(x.y()); };
    p.grad_u = [](const Point& x) {
      return Point(std::cos(x.x()) * std::sin(x.y()), std::sin(x.x()) * std::cos(x.y()));
    };
    p.c = shifted_bilinear(lambda);
    p.c_degree = lambda == 0.0 ? 0 : 2;
    p.f = [lambda](const Point& x) {
      const double sx = std::sin(x.x());
      const double sy = std::sin(x.y());
      return std::cos(x.x()) * sy + sx * std::cos(x.y()) + lambda * (x.x() - 0.5) * (x.y() - 0.5) * sx * sy;
    };
  } else if (name == "patch-linear") {
    p.u = [](const Point& x) { return x.x() + x.y(); };
    p.grad_u = constant_field(Point(1.0, 1.0));
    p.c = constant_field(0.0);
    p.f = constant_field(2.0);
  } else if (name == "patch-quadratic") {
    p.u = [](const Point& x) { return x.x() * x.x() - x.y(); };
    p.grad_u = [](const Point& x) { return Point(2.0 * x.x(), -1.0); };
    p.c = constant_field(0.0);
    p.f = [](const Point& x) { return 2.0 * x.x() - 1.0; };
  } else if (name == "zero") {
    p.parameters["lambda"] = lambda;
    p.u = constant_field(0.0);
    p.grad_u = constant_field(Point(0.0, 0.0));
    p.c = shifted_bilinear(lambda);
    p.c_degree = lambda == 0.0 ? 0 : 2;
    p.f = constant_field(0.0);
  } else {
    throw ConfigError("unknown problem '" + name + "'");
  }
  return p;
}

double pde_residual(const ProblemSpec& problem, std::size_t n_points, std::uint64_t seed, const Box& box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
  std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
  double worst = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const Point x(ux(rng), uy(rng));
    const double f = problem.f(x);
    const double lhs = problem.beta(x).dot(problem.grad_u(x)) + problem.c(x) * problem.u(x);
    worst = std::max(worst, std::abs(lhs - f) / std::max(1.0, std::abs(f)));
  }
  return worst;
}

} // namespace wgls
