#pragma once

#include "wgls/fields.hpp"
#include "wgls/polymesh.hpp"
#include "wgls/system.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace wgls {

/// Manufactured problem: exact solution, its gradient, and the data derived from it.
struct ProblemSpec {
  std::string name;
  ScalarField u;
  VectorField grad_u;
  VectorField beta;
  ScalarField c;
  ScalarField f;
  int c_degree = 0; // polynomial degree of c, used to size the cell quadrature
  std::map<std::string, double> parameters;

  /// Inflow data g is the trace of the exact solution.
  [[nodiscard]] CoefficientField coefficients() const { return {beta, c, f, u}; }
};

/// Built-in problems:
///   sin              u = sin x sin y, beta = (1,1), c = lambda (x - 1/2)(y - 1/2)
///   patch-linear     u = x + y,       beta = (1,1), c = 0
///   patch-quadratic  u = x^2 - y,     beta = (1,1), c = 0
///   zero             u = 0, f = 0,    beta = (1,1), c = lambda (x - 1/2)(y - 1/2)
ProblemSpec make_problem(const std::string& name, double lambda = 1.0);
std::vector<std::string> problem_names();

/// max |beta . grad u + c u - f| / max(1, |f|) over n random points of the box.
double pde_residual(const ProblemSpec& problem, std::size_t n_points, std::uint64_t seed, const Box& box = Box{});

enum class MeshFamily { Triangular, NonconvexPolygonal, File };

std::string to_string(MeshFamily family);
MeshFamily mesh_family_from_string(const std::string& name);

/// Default weak-gradient degree: k + 1 on triangles, k + 2 on the nonconvex polygonal family.
int default_grad_degree(MeshFamily family, int degree);

/// Mesh of the given family and level on the default box (-1,1)^2.
PolyMesh make_mesh(MeshFamily family, int level, const std::filesystem::path& file = {});

struct StudyConfig {
  MeshFamily family = MeshFamily::Triangular;
  std::filesystem::path mesh_file;
  int level_min = 1;
  int level_max = 3;
  int degree = 1;
  int grad_degree = -1; // -1: default_grad_degree(family, degree)
  std::string problem = "sin";
  double lambda = 1.0;
  SolverOptions solver;
  std::size_t dof_budget = 500000;

  [[nodiscard]] int effective_grad_degree() const;
  /// Throws ConfigError when out of range.
  void validate() const;
};

struct LevelResult {
  int level = 0;
  std::size_t n_cells = 0;
  std::size_t n_dofs = 0;
  std::size_t n_free = 0;
  double h = 0.0;
  ErrorReport errors;
  SolverStats stats;
};

/// Orders between consecutive levels; NaN marks an order that cannot be computed.
struct OrderRow {
  double l2 = 0.0;
  double weak_grad = 0.0;
  double energy = 0.0;
};

struct ConvergenceReport {
  StudyConfig config;
  std::vector<LevelResult> levels;
  std::vector<OrderRow> orders; // orders[i] compares levels[i] and levels[i + 1]
  bool complete = true;
  std::string failure; // set when a level failed; earlier levels are retained
  std::vector<std::string> notes;
};

/// log2(e[i-1] / e[i]) for i >= 1. Entries at or below zero_threshold give NaN.
std::vector<double> compute_orders(std::span<const double> errors, double zero_threshold = 0.0);

/// Errors at or below this are treated as exact when computing orders.
inline constexpr double kOrderZeroThreshold = 1e-12;

/// One refinement level: mesh, space, assembly, inflow constraints, solve, error norms.
LevelResult run_level(const StudyConfig& config, int level);

ConvergenceReport run_study(const StudyConfig& config);

enum class ReportFormat { Csv, Json, Markdown };

ReportFormat report_format_from_string(const std::string& name);

void write_report(const ConvergenceReport& report, ReportFormat format, std::ostream& out);
/// Writes to path; throws IoError when the file cannot be written.
void emit_report(const ConvergenceReport& report, ReportFormat format, const std::filesystem::path& path);
/// Inverse of the JSON output.
ConvergenceReport report_from_json(const std::string& text);

} // namespace wgls
