#include "wgls/error.hpp"
#include "wgls/polymesh.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace wgls {

namespace {

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line; throws at end of input.
  std::istringstream next(const char* expecting) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return std::istringstream(line);
    }
    throw ParseError(std::string("unexpected end of input, expecting ") + expecting, line_no_ + 1);
  }

  [[nodiscard]] std::size_t line() const { return line_no_; }

private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

void expect_end(std::istringstream& ss, std::size_t line) {
  std::string extra;
  if (ss >> extra) throw ParseError("unexpected trailing token '" + extra + "'", line);
}

std::size_t read_count(LineReader& reader, const std::string& keyword) {
  auto ss = reader.next(keyword.c_str());
  std::string word;
  long long count = -1;
  if (!(ss >> word) || word != keyword)
    throw ParseError("expected '" + keyword + " <count>'", reader.line());
  if (!(ss >> count) || count < 0)
    throw ParseError("invalid " + keyword + " count", reader.line());
  expect_end(ss, reader.line());
  return static_cast<std::size_t>(count);
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

PolyMesh read_mesh(std::istream& in) {
  LineReader reader(in);
  {
    auto ss = reader.next("header");
    std::string magic;
    int dim = 0;
    if (!(ss >> magic) || magic != "polymesh") throw ParseError("expected header 'polymesh 2'", reader.line());
    if (!(ss >> dim) || dim != 2) throw ParseError("only dimension 2 is supported", reader.line());
    expect_end(ss, reader.line());
  }

  const std::size_t n_vertices = read_count(reader, "vertices");
  std::vector<Point> vertices;
  vertices.reserve(n_vertices);
  for (std::size_t i = 0; i < n_vertices; ++i) {
    auto ss = reader.next("vertex coordinates");
    double x = 0.0;
    double y = 0.0;
    if (!(ss >> x >> y)) throw ParseError("expected 'x y'", reader.line());
    expect_end(ss, reader.line());
    vertices.emplace_back(x, y);
  }

  const std::size_t n_cells = read_count(reader, "cells");
  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    auto ss = reader.next("cell");
    long long n = 0;
    if (!(ss >> n) || n < 3) throw ParseError("cell needs a vertex count >= 3", reader.line());
    std::vector<std::size_t> loop;
    loop.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
      long long v = -1;
      if (!(ss >> v) || v < 0) throw ParseError("invalid vertex index in cell", reader.line());
      loop.push_back(static_cast<std::size_t>(v));
    }
    expect_end(ss, reader.line());
    cells.push_back(std::move(loop));
  }

  std::string rest;
  std::size_t line_no = reader.line();
  while (std::getline(in, rest)) {
    ++line_no;
    const auto first = rest.find_first_not_of(" \t\r");
    if (first != std::string::npos && rest[first] != '#')
      throw ParseError("unexpected content after the last cell", line_no);
  }

  return PolyMesh(std::move(vertices), std::move(cells));
}

void write_mesh(const PolyMesh& mesh, std::ostream& out) {
  out << "polymesh 2\n";
  out << "vertices " << mesh.n_vertices() << '\n';
  for (const auto& v : mesh.vertices()) out << format_real(v.x()) << ' ' << format_real(v.y()) << '\n';
  out << "cells " << mesh.n_cells() << '\n';
  for (const auto& c : mesh.cells()) {
    out << c.vertex_ids.size();
    for (std::size_t v : c.vertex_ids) out << ' ' << v;
    out << '\n';
  }
}

PolyMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path.string());
  return read_mesh(in);
}

void save_mesh(const PolyMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file " + path.string());
  write_mesh(mesh, out);
  if (!out) throw IoError("error while writing mesh file " + path.string());
}

} // namespace wgls
