#include "wgls/convergence.hpp"
#include "wgls/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace wgls {

namespace {

using nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Mantissa in [0.1, 1) with three digits, e.g. 0.649E-4.
std::string sci(double v) {
  if (std::isnan(v)) return "-";
  if (v == 0.0) return "0.000E0";
  int e = static_cast<int>(std::floor(std::log10(std::abs(v)))) + 1;
  double m = v / std::pow(10.0, e);
  if (std::abs(m) >= 0.9995) {
    m /= 10.0;
    ++e;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3fE%d", m, e);
  return buf;
}

std::string ord(double v) {
  if (std::isnan(v)) return "-";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

json number(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double from_json_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

void write_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "level,n_dofs,h,err_l2,ord_l2,err_wgrad,ord_wgrad,err_energy,ord_energy,cg_iters\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelResult& lv = report.levels[i];
    const bool first = i == 0;
    const OrderRow o = first ? OrderRow{} : report.orders[i - 1];
    out << lv.level << ',' << lv.n_dofs << ',' << num(lv.h) << ',' << num(lv.errors.l2_interior) << ','
        << (first ? "" : num(o.l2)) << ',' << num(lv.errors.weak_grad) << ',' << (first ? "" : num(o.weak_grad))
        << ',' << num(lv.errors.energy) << ',' << (first ? "" : num(o.energy)) << ',' << lv.stats.iterations
        << '\n';
  }
}

void write_markdown(const ConvergenceReport& report, std::ostream& out) {
  const StudyConfig& c = report.config;
  out << "family " << to_string(c.family) << ", problem " << c.problem << ", k = " << c.degree
      << ", r = " << c.effective_grad_degree() << ", lambda = " << num(c.lambda) << "\n\n";
  out << "| level | h | dofs | L2 error | order | weak grad error | order | energy error | order |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelResult& lv = report.levels[i];
    const OrderRow o = i == 0 ? OrderRow{std::nan(""), std::nan(""), std::nan("")} : report.orders[i - 1];
    char h[32];
    std::snprintf(h, sizeof h, "%.4g", lv.h);
    out << "| " << lv.level << " | " << h << " | " << lv.n_dofs << " | " << sci(lv.errors.l2_interior) << " | "
        << ord(o.l2) << " | " << sci(lv.errors.weak_grad) << " | " << ord(o.weak_grad) << " | "
        << sci(lv.errors.energy) << " | " << ord(o.energy) << " |\n";
  }
  for (const auto& n : report.notes) out << "\nnote: " << n << '\n';
  if (!report.complete) out << "\nfailed: " << report.failure << '\n';
}

json to_json(const ConvergenceReport& report) {
  const StudyConfig& c = report.config;
  json cfg = {{"family", to_string(c.family)},
              {"mesh_file", c.mesh_file.string()},
              {"level_min", c.level_min},
              {"level_max", c.level_max},
              {"degree", c.degree},
              {"grad_degree", c.grad_degree},
              {"problem", c.problem},
              {"lambda", c.lambda},
              {"solver", to_string(c.solver.kind)},
              {"tolerance", c.solver.tolerance},
              {"max_iterations", c.solver.max_iterations},
              {"dense_limit", c.solver.dense_limit},
              {"dof_budget", c.dof_budget}};
  json levels = json::array();
  for (const auto& lv : report.levels) {
    levels.push_back({{"level", lv.level},
                      {"n_cells", lv.n_cells},
                      {"n_dofs", lv.n_dofs},
                      {"n_free", lv.n_free},
                      {"h", lv.h},
                      {"err_l2", number(lv.errors.l2_interior)},
                      {"err_wgrad", number(lv.errors.weak_grad)},
                      {"err_energy", number(lv.errors.energy)},
                      {"solver", to_string(lv.stats.method)},
                      {"iterations", lv.stats.iterations},
                      {"relative_residual", number(lv.stats.relative_residual)}});
  }
  json orders = json::array();
  for (const auto& o : report.orders)
    orders.push_back({{"l2", number(o.l2)}, {"wgrad", number(o.weak_grad)}, {"energy", number(o.energy)}});
  return {{"config", cfg},           {"levels", levels},   {"orders", orders},
          {"complete", report.complete}, {"failure", report.failure}, {"notes", report.notes}};
}

} // namespace

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  throw ConfigError("unknown report format '" + name + "' (expected csv, json or markdown)");
}

void write_report(const ConvergenceReport& report, ReportFormat format, std::ostream& out) {
  switch (format) {
  case ReportFormat::Csv: write_csv(report, out); break;
  case ReportFormat::Json: out << to_json(report).dump(2) << '\n'; break;
  case ReportFormat::Markdown: write_markdown(report, out); break;
  }
}

void emit_report(const ConvergenceReport& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_report(report, format, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ConvergenceReport report_from_json(const std::string& text) {
  ConvergenceReport report;
  try {
    const json j = json::parse(text);
    const json& c = j.at("config");
    StudyConfig& cfg = report.config;
    cfg.family = mesh_family_from_string(c.at("family").get<std::string>());
    cfg.mesh_file = c.at("mesh_file").get<std::string>();
    cfg.level_min = c.at("level_min").get<int>();
    cfg.level_max = c.at("level_max").get<int>();
    cfg.degree = c.at("degree").get<int>();
    cfg.grad_degree = c.at("grad_degree").get<int>();
    cfg.problem = c.at("problem").get<std::string>();
    cfg.lambda = c.at("lambda").get<double>();
    cfg.solver.kind = solver_kind_from_string(c.at("solver").get<std::string>());
    cfg.solver.tolerance = c.at("tolerance").get<double>();
    cfg.solver.max_iterations = c.at("max_iterations").get<std::size_t>();
    cfg.solver.dense_limit = c.at("dense_limit").get<std::size_t>();
    cfg.dof_budget = c.at("dof_budget").get<std::size_t>();
    for (const json& l : j.at("levels")) {
      LevelResult lv;
      lv.level = l.at("level").get<int>();
      lv.n_cells = l.at("n_cells").get<std::size_t>();
      lv.n_dofs = l.at("n_dofs").get<std::size_t>();
      lv.n_free = l.at("n_free").get<std::size_t>();
      lv.h = l.at("h").get<double>();
      lv.errors.l2_interior = from_json_number(l.at("err_l2"));
      lv.errors.weak_grad = from_json_number(l.at("err_wgrad"));
      lv.errors.energy = from_json_number(l.at("err_energy"));
      lv.stats.method = solver_kind_from_string(l.at("solver").get<std::string>());
      lv.stats.iterations = l.at("iterations").get<std::size_t>();
      lv.stats.relative_residual = from_json_number(l.at("relative_residual"));
      report.levels.push_back(lv);
    }
    for (const json& o : j.at("orders"))
      report.orders.push_back(
          {from_json_number(o.at("l2")), from_json_number(o.at("wgrad")), from_json_number(o.at("energy"))});
    report.complete = j.at("complete").get<bool>();
    report.failure = j.at("failure").get<std::string>();
    report.notes = j.at("notes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid report JSON: ") + e.what(), 0);
  }
  return report;
}

} // namespace wgls
