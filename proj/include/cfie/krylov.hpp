#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace cfie {

using CVector = Eigen::VectorXcd;
using LinearOperator = std::function<CVector(const CVector&)>;

struct SolveReport {
  CVector x;
  int iterations = 0;
  // residuals[0] is the starting residual (1 for a zero initial guess), then
  // one entry per iteration.
  std::vector<double> residuals;
  bool converged = false;
  double wall_seconds = 0.0;

  double achieved() const { return residuals.empty() ? 1.0 : residuals.back(); }
};

struct GmresOptions {
  double tol = 1e-6;
  int restart = 0;  // 0: no restart
  int max_iter = 1000;
};

// Left-preconditioned GMRES from x0 = 0. The convergence test and the
// recorded history use ||M (b - A x)|| / ||M b||.
SolveReport gmres(const LinearOperator& apply_a, const CVector& b, const GmresOptions& opts = {},
                  const LinearOperator& left_precond = {});

struct CgOptions {
  double tol = 1e-12;
  int max_iter = 5000;
};

// CG for Hermitian positive semidefinite operators. `deflation` holds an
// orthonormal basis of the null space; b and every iterate are projected
// against it. Throws std::domain_error on negative curvature.
SolveReport cg(const LinearOperator& apply_spd, const CVector& b, const CgOptions& opts = {},
               const std::vector<CVector>& deflation = {});

}  // namespace cfie
