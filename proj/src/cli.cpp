#include "wgls/cli.hpp"

#include "wgls/convergence.hpp"
#include "wgls/error.hpp"
#include "wgls/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wgls {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::pair<int, int> parse_levels(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int l = std::stoi(text);
      return {l, l};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ConfigError("levels must look like A..B, got '" + text + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct StudyArgs {
  std::string family;
  std::string mesh;
  std::string levels;
  int degree = 0;
  int grad_degree = -1;
  std::string problem;
  double lambda = 1.0;
  std::string format = "csv";
  std::string out;
  std::string solver;
  double tol = 0.0;
  std::size_t dof_budget = 0;
  std::string config;
};

void apply_key(StudyConfig& cfg, std::string& format, const std::string& key, const std::string& value) {
  try {
    if (key == "family") cfg.family = mesh_family_from_string(value);
    else if (key == "mesh") cfg.mesh_file = value;
    else if (key == "levels") std::tie(cfg.level_min, cfg.level_max) = parse_levels(value);
    else if (key == "degree") cfg.degree = std::stoi(value);
    else if (key == "grad_degree" || key == "grad-degree") cfg.grad_degree = std::stoi(value);
    else if (key == "problem") cfg.problem = value;
    else if (key == "lambda") cfg.lambda = std::stod(value);
    else if (key == "format") format = value;
    else if (key == "solver") cfg.solver.kind = solver_kind_from_string(value);
    else if (key == "tol") cfg.solver.tolerance = std::stod(value);
    else if (key == "dof_budget" || key == "dof-budget") cfg.dof_budget = std::stoull(value);
    else throw ConfigError("unknown config key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value '" + value + "' for '" + key + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("value out of range for '" + key + "'");
  }
}

void read_config_file(const std::string& path, StudyConfig& cfg, std::string& format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in '" + path + "'", number);
    apply_key(cfg, format, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

int run_study_command(const StudyArgs& a, CLI::App& cmd, std::ostream& out, std::ostream& err) {
  StudyConfig cfg;
  std::string format = "csv";
  if (!a.config.empty()) read_config_file(a.config, cfg, format);
  auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
  if (given("--family")) cfg.family = mesh_family_from_string(a.family);
  if (given("--mesh")) {
    cfg.mesh_file = a.mesh;
    if (!given("--family")) cfg.family = MeshFamily::File;
  }
  if (given("--levels")) std::tie(cfg.level_min, cfg.level_max) = parse_levels(a.levels);
  if (given("--degree")) cfg.degree = a.degree;
  if (given("--grad-degree")) cfg.grad_degree = a.grad_degree;
  if (given("--problem")) cfg.problem = a.problem;
  if (given("--lambda")) cfg.lambda = a.lambda;
  if (given("--format")) format = a.format;
  if (given("--solver")) cfg.solver.kind = solver_kind_from_string(a.solver);
  if (given("--tol")) cfg.solver.tolerance = a.tol;
  if (given("--dof-budget")) cfg.dof_budget = a.dof_budget;
  const ReportFormat fmt = report_format_from_string(format);
  cfg.validate();

  const ConvergenceReport report = run_study(cfg);
  if (a.out.empty())
    write_report(report, fmt, out);
  else
    emit_report(report, fmt, a.out);
  for (const auto& n : report.notes) err << "note: " << n << '\n';
  if (!report.complete) {
    err << "error: " << report.failure << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int run_mesh_command(const std::string& action, const std::string& family_name, int level,
                     const std::string& path, std::ostream& out) {
  if (action == "generate") {
    const MeshFamily family = mesh_family_from_string(family_name);
    if (family == MeshFamily::File) throw ConfigError("mesh generate needs triangular or polygonal");
    const PolyMesh mesh = make_mesh(family, level);
    if (path.empty())
      write_mesh(mesh, out);
    else
      save_mesh(mesh, path);
    return kExitOk;
  }
  if (action == "inspect") {
    if (path.empty()) throw ConfigError("mesh inspect needs --file");
    const PolyMesh mesh = load_mesh(path);
    std::size_t nonconvex = 0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c)
      if (!is_convex(mesh.cell_polygon(c))) ++nonconvex;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "vertices %zu\nfacets %zu\ncells %zu\nboundary facets %zu\nnonconvex cells %zu\n"
                  "area %.17g\nh %.17g\n",
                  mesh.n_vertices(), mesh.n_facets(), mesh.n_cells(), mesh.boundary_facets().size(), nonconvex,
                  mesh.total_area(), mesh.mesh_size());
    out << buf;
    return kExitOk;
  }
  throw ConfigError("unknown mesh action '" + action + "' (expected generate or inspect)");
}

int run_verify_command(const std::string& suite, int degree, std::ostream& out) {
  const std::vector<CheckResult> results = run_verify_suite(suite, degree);
  bool ok = true;
  for (const auto& r : results) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s %-22s %.3e (tol %.1e) ", r.passed() ? "PASS" : "FAIL", r.name.c_str(),
                  r.value, r.tolerance);
    out << buf << r.detail << '\n';
    ok = ok && r.passed();
  }
  return ok ? kExitOk : kExitFailure;
}

} // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak Galerkin least-squares solver for steady transport on polygonal meshes", "wgls"};
  app.require_subcommand(1);

  StudyArgs sa;
  CLI::App* study = app.add_subcommand("study", "Run a convergence study");
  study->add_option("--family", sa.family, "triangular, polygonal or file");
  study->add_option("--mesh", sa.mesh, "Mesh file (family 'file')");
  study->add_option("--levels", sa.levels, "Refinement levels A..B");
  study->add_option("--degree", sa.degree, "Polynomial degree k")->check(CLI::Range(1, 6));
  study->add_option("--grad-degree", sa.grad_degree, "Weak gradient degree r >= k");
  study->add_option("--problem", sa.problem, "sin, patch-linear, patch-quadratic or zero");
  study->add_option("--lambda", sa.lambda, "Reaction scaling");
  study->add_option("--format", sa.format, "csv, json or markdown");
  study->add_option("--out", sa.out, "Output file (default stdout)");
  study->add_option("--solver", sa.solver, "auto, cg or cholesky");
  study->add_option("--tol", sa.tol, "Relative residual tolerance of CG");
  study->add_option("--dof-budget", sa.dof_budget, "Largest number of unknowns per level");
  study->add_option("--config", sa.config, "key=value file; flags override it");

  std::string mesh_action;
  std::string mesh_family = "triangular";
  int mesh_level = 1;
  std::string mesh_file;
  CLI::App* mesh = app.add_subcommand("mesh", "Generate or inspect meshes");
  mesh->add_option("action", mesh_action, "generate or inspect")->required();
  mesh->add_option("--family", mesh_family, "triangular or polygonal");
  mesh->add_option("--level", mesh_level, "Refinement level")->check(CLI::Range(0, 12));
  mesh->add_option("--file,--out", mesh_file, "Mesh file to write or read");

  std::string suite = "all";
  int verify_degree = 1;
  CLI::App* verify = app.add_subcommand("verify", "Run built-in numerical checks");
  verify->add_option("--suite", suite, "commutativity, spd, patch, error-equation, zero or all");
  verify->add_option("--degree", verify_degree, "Polynomial degree k")->check(CLI::Range(1, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*study) return run_study_command(sa, *study, out, err);
    if (*mesh) return run_mesh_command(mesh_action, mesh_family, mesh_level, mesh_file, out);
    if (*verify) return run_verify_command(suite, verify_degree, out);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

} // namespace wgls
