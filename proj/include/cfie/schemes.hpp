#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "cfie/assembly.hpp"
#include "cfie/basis.hpp"
#include "cfie/krylov.hpp"
#include "cfie/preconditioners.hpp"

namespace cfie {

enum class Equation { efie, cfie };

// loop: loop / h-n-sol, hloop: h-loop / h-n-sol, projector: left M.
enum class SchemeId { none, loopstar, loop, hloop, projector };

struct SchemeDescriptor {
  Equation equation = Equation::cfie;
  SchemeId id = SchemeId::projector;

  // "efie-none", "cfie-projector", ...
  std::string name() const;
  bool operator==(const SchemeDescriptor&) const = default;
};

// Accepts "<scheme>" (CFIE) or "<efie|cfie>-<scheme>".
SchemeDescriptor parse_scheme(const std::string& text);
const char* to_string(SchemeId id);

enum class DPhiMode { jacobi, dyadic };

struct SchemeOptions {
  DPhiMode dphi = DPhiMode::jacobi;
  // Multiply the dyadic level scaling into the Jacobi one instead of replacing it.
  bool compose_dyadic = false;
  double loop_exponent = 0.0;
  double inner_tol = 1e-12;
  double power_tol = 1e-3;
  std::uint64_t seed = 1;
  int branching = 4;
};

// Assembled operators for one mesh and frequency.
struct Problem {
  std::string geometry;
  std::shared_ptr<const RefinementHierarchy> hierarchy;  // null for unstructured meshes
  RwgBasis basis;
  double f_hz = 0.0;
  double k = 0.0;
  double alpha = kDefaultAlpha;
  OperatorSet ops;
  SystemMatrix ze, zm, zc;
  CVector ve, vc;

  const SystemMatrix& system(Equation eq) const { return eq == Equation::efie ? ze : zc; }
  const CVector& rhs(Equation eq) const { return eq == Equation::efie ? ve : vc; }
};

Problem make_problem(std::shared_ptr<const RefinementHierarchy> hierarchy, const std::string& geometry, double f_hz,
                     double alpha = kDefaultAlpha, const QuadratureOptions& quad = {});
Problem make_problem(const SurfaceMesh& mesh, const std::string& geometry, double f_hz,
                     double alpha = kDefaultAlpha, const QuadratureOptions& quad = {});

struct PreparedSystem {
  SchemeDescriptor scheme;
  Eigen::MatrixXcd matrix;  // split: D H^T Z H D; left: Z
  CVector rhs;
  SparseMatrix recover;  // RWG coefficients = recover * y; empty for identity
  std::optional<LeftPreconditioner> left;

  int size() const { return static_cast<int>(matrix.rows()); }
  CVector to_rwg(const CVector& y) const;
  // The matrix whose spectrum the scheme controls (M Z for the left scheme).
  Eigen::MatrixXcd preconditioned_dense() const;
};

PreparedSystem prepare_system(const Problem& problem, const SchemeDescriptor& scheme,
                              const SchemeOptions& opts = {});

struct SolveOutcome {
  SolveReport report;
  CVector current;            // RWG coefficients
  double true_residual = 0.0;  // ||v - Z i|| / ||v|| in the RWG system
};

SolveOutcome solve_prepared(const Problem& problem, const PreparedSystem& sys, const GmresOptions& opts);

// Dense LU reference solution of Z i = v.
CVector direct_solve(const Problem& problem, Equation eq);

}  // namespace cfie
