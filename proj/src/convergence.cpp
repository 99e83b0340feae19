#include "wgls/convergence.hpp"

#include "wgls/error.hpp"
#include "wgls/weakcalc.hpp"

#include <cmath>
#include <limits>

namespace wgls {

std::string to_string(MeshFamily family) {
  switch (family) {
  case MeshFamily::Triangular: return "triangular";
  case MeshFamily::NonconvexPolygonal: return "polygonal";
  case MeshFamily::File: return "file";
  }
  return "triangular";
}

MeshFamily mesh_family_from_string(const std::string& name) {
  if (name == "triangular") return MeshFamily::Triangular;
  if (name == "polygonal" || name == "nonconvex-polygonal") return MeshFamily::NonconvexPolygonal;
  if (name == "file") return MeshFamily::File;
  throw ConfigError("unknown mesh family '" + name + "' (expected triangular, polygonal or file)");
}

int default_grad_degree(MeshFamily family, int degree) {
  return family == MeshFamily::NonconvexPolygonal ? degree + 2 : degree + 1;
}

PolyMesh make_mesh(MeshFamily family, int level, const std::filesystem::path& file) {
  switch (family) {
  case MeshFamily::Triangular: return generate_triangular(level);
  case MeshFamily::NonconvexPolygonal: return generate_nonconvex_polygonal(level);
  case MeshFamily::File: return load_mesh(file);
  }
  throw ConfigError("unknown mesh family");
}

int StudyConfig::effective_grad_degree() const {
  return grad_degree >= 0 ? grad_degree : default_grad_degree(family, degree);
}

void StudyConfig::validate() const {
  if (degree < 1 || degree > 6) throw ConfigError("degree k must satisfy 1 <= k <= 6");
  if (effective_grad_degree() < degree) throw ConfigError("gradient degree r must satisfy r >= k");
  if (level_min > level_max) throw ConfigError("levels must be ascending");
  if (level_min < 0) throw ConfigError("levels must be >= 0");
  if (family == MeshFamily::NonconvexPolygonal && level_min < 1)
    throw ConfigError("the polygonal family starts at level 1");
  if (family == MeshFamily::File && mesh_file.empty()) throw ConfigError("mesh family 'file' needs a mesh path");
  if (!(solver.tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
  make_problem(problem, lambda);
}

std::vector<double> compute_orders(std::span<const double> errors, double zero_threshold) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double prev = errors[i - 1];
    const double cur = errors[i];
    if (!(prev > zero_threshold) || !(cur > zero_threshold))
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    else
      out.push_back(std::log2(prev / cur));
  }
  return out;
}

LevelResult run_level(const StudyConfig& config, int level) {
  const ProblemSpec problem = make_problem(config.problem, config.lambda);
  const CoefficientField coeffs = problem.coefficients();
  const PolyMesh mesh = make_mesh(config.family, level, config.mesh_file);

  SpaceOptions options;
  options.coefficient_degree = problem.c_degree;
  const WeakSpace space(mesh, config.degree, config.effective_grad_degree(), options);
  const WeakGradientOperator grad(space);
  LinearSystem system = apply_inflow_bc(assemble(grad, coeffs), space, coeffs);

  LevelResult result;
  result.level = level;
  result.n_cells = mesh.n_cells();
  result.n_dofs = space.n_dofs();
  result.n_free = system.n_free();
  result.h = mesh.mesh_size();
  const Solution sol = solve(system, config.solver);
  result.stats = sol.stats;
  result.errors = error_norms(grad, coeffs, WeakFunction(space, sol.coefficients), problem.u);
  return result;
}

namespace {

// Number of dofs of a level, computed from the mesh alone.
std::size_t predicted_dofs(const StudyConfig& config, int level) {
  const std::size_t cell_block = static_cast<std::size_t>(poly_dim(config.degree));
  const std::size_t facet_block = static_cast<std::size_t>(config.degree + 1);
  const std::size_t n = std::size_t{1} << level;
  switch (config.family) {
  case MeshFamily::Triangular: return 2 * n * n * cell_block + (3 * n * n + 2 * n) * facet_block;
  case MeshFamily::NonconvexPolygonal: {
    const std::size_t fine = 2 * n;
    // Edges of the fine grid, less the two inside each L-shaped cell.
    return 2 * n * n * cell_block + (2 * fine * (fine + 1) - 2 * n * n) * facet_block;
  }
  case MeshFamily::File: return 0;
  }
  return 0;
}

} // namespace

ConvergenceReport run_study(const StudyConfig& config) {
  config.validate();
  ConvergenceReport report;
  report.config = config;
  const int last = config.family == MeshFamily::File ? config.level_min : config.level_max;
  for (int level = config.level_min; level <= last; ++level) {
    if (predicted_dofs(config, level) > config.dof_budget) {
      report.notes.push_back("level " + std::to_string(level) + " skipped: more than " +
                             std::to_string(config.dof_budget) + " dofs");
      break;
    }
    try {
      report.levels.push_back(run_level(config, level));
    } catch (const Error& e) {
      report.complete = false;
      report.failure = "level " + std::to_string(level) + ": " + e.what();
      break;
    }
  }

  std::vector<double> l2;
  std::vector<double> wg;
  std::vector<double> en;
  for (const auto& lv : report.levels) {
    l2.push_back(lv.errors.l2_interior);
    wg.push_back(lv.errors.weak_grad);
    en.push_back(lv.errors.energy);
  }
  const auto o_l2 = compute_orders(l2, kOrderZeroThreshold);
  const auto o_wg = compute_orders(wg, kOrderZeroThreshold);
  const auto o_en = compute_orders(en, kOrderZeroThreshold);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < o_l2.size(); ++i) {
    const double ratio = report.levels[i + 1].h / report.levels[i].h;
    const bool halved = std::abs(ratio - 0.5) <= 1e-12;
    report.orders.push_back(halved ? OrderRow{o_l2[i], o_wg[i], o_en[i]} : OrderRow{nan, nan, nan});
  }
  return report;
}

} // namespace wgls
