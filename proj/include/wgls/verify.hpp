#pragma once

#include "wgls/convergence.hpp"
#include "wgls/fields.hpp"
#include "wgls/polymesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wgls {

/// Bivariate polynomial sum c_ab x^a y^b with a + b <= degree.
struct Polynomial {
  int degree = 0;
  std::vector<double> coefficients; // same ordering as the exponents
  std::vector<std::array<int, 2>> exponents;

  [[nodiscard]] double operator()(const Point& p) const;
  [[nodiscard]] Point gradient(const Point& p) const;
  [[nodiscard]] ScalarField field() const;
  [[nodiscard]] VectorField gradient_field() const;
};

/// Coefficients uniform in [-1, 1].
Polynomial random_polynomial(int degree, std::uint64_t seed);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;

  [[nodiscard]] bool passed() const { return value <= tolerance; }
};

/// Relative commutativity defect for a random polynomial of degree <= k.
CheckResult check_commutativity(const PolyMesh& mesh, int k, int r, std::uint64_t seed, double tolerance = 1e-10);

/// Symmetry defect and positive definiteness of the constrained system for u = sin x sin y data.
/// value is max(|A - A^T|_max / |A|_max, 0 if the smallest eigenvalue is positive else 1).
CheckResult check_spd(const PolyMesh& mesh, int k, int r, double tolerance = 1e-12);

/// Solves with data from a built-in patch problem and reports the largest error norm.
CheckResult check_patch(const PolyMesh& mesh, int k, int r, const std::string& problem, double tolerance = 1e-9);

/// Random draw of piecewise constant beta and c on the 2 x 2 quadrant partition of the box and a
/// random polynomial solution of degree k + 2. Reports the relative error-equation defect.
CheckResult check_error_equation(const PolyMesh& mesh, int k, int r, std::uint64_t seed, double tolerance = 1e-9);

/// max |u_h| for f = 0 and g = 0.
CheckResult check_zero_data(const PolyMesh& mesh, int k, int r, double tolerance = 1e-12);

/// Suite runner used by the command line tool. Suites: commutativity, spd, patch, error-equation,
/// zero, all.
std::vector<CheckResult> run_verify_suite(const std::string& suite, int degree);

} // namespace wgls
