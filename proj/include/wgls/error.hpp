#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wgls {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Structurally inconsistent data (bad connectivity, non-simple polygons, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Degenerate geometry met while building quadrature or local operators.
class GeometryError : public Error {
public:
  using Error::Error;
};

/// Invalid or incomplete configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// The linear solver failed: the system is not SPD or too ill-conditioned.
class SolverError : public Error {
public:
  SolverError(const std::string& message, std::vector<double> residual_history)
      : Error(message), history_(std::move(residual_history)) {}

  /// Relative residual after each iteration (empty for direct solvers).
  [[nodiscard]] const std::vector<double>& residual_history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

} // namespace wgls
