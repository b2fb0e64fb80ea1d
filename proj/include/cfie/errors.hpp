#pragma once

#include <stdexcept>
#include <string>

namespace cfie {

// Malformed input text (OFF payloads, config files, matrix files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mesh connectivity that violates the closed 2-manifold contract.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Valid input the workbench does not handle (open surfaces, handles).
class UnsupportedGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A transform whose congruence diagonal vanishes.
class SingularBasis : public std::runtime_error {
 public:
  SingularBasis(const std::string& what, int column)
      : std::runtime_error(what), column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

// Iterative solver failure inside an operator that must be exact.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Dense operation requested above the configured size cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace cfie
