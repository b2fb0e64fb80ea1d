#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cfie/assembly.hpp"
#include "cfie/basis.hpp"
#include "cfie/krylov.hpp"

namespace cfie {

// Data for P = Lambda L^+ Lambda^T with L = Lambda^T Lambda, Lambda undropped.
struct ProjectorContext {
  SparseTransform loops;
  SparseMatrix laplacian;
  std::vector<CVector> deflation;  // normalized constants, one per component
  double inner_tol = 1e-12;
  int max_inner = 0;  // 0: 10 V + 100
};

ProjectorContext make_projector_context(const Topology& topo, double inner_tol = 1e-12);

// Throws ConvergenceError when the inner CG misses its tolerance.
CVector solenoidal_projector_apply(const ProjectorContext& ctx, const CVector& x);
Eigen::MatrixXcd solenoidal_projector_apply(const ProjectorContext& ctx, const Eigen::MatrixXcd& x);

// [D]_ii = 1 / sqrt(|(S^T Z S)_ii|), diagonal only.
DiagonalScaling jacobi_rescale(const SparseTransform& s, const Eigen::MatrixXcd& z);
DiagonalScaling jacobi_rescale(const SparseTransform& s, const SystemMatrix& z);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value by power iteration on adjoint(apply(.)). Stops once
// ||A^H A x - s^2 x|| <= tol s^2 for the current unit iterate x.
NormEstimate estimate_spectral_norm(const LinearOperator& apply, const LinearOperator& adjoint, int n,
                                    double tol = 1e-3, std::uint64_t seed = 1, int max_iter = 500);

// M x = P x / alpha_norm + S D^2 S^T x / beta_norm.
struct LeftPreconditioner {
  ProjectorContext projector;
  SparseMatrix s;
  Eigen::VectorXd dphi;
  double alpha_norm = 1.0;
  double beta_norm = 1.0;
  NormEstimate alpha_estimate;
  NormEstimate beta_estimate;
  // Test hook: drop the star term, as if beta_norm were infinite.
  bool star_term = true;

  CVector apply(const CVector& x) const;
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const;
  CVector star_part(const CVector& x) const;
};

struct NormOptions {
  double tol = 1e-3;
  std::uint64_t seed = 1;
};

LeftPreconditioner build_left_preconditioner(const ProjectorContext& projector, const SparseTransform& s,
                                             const DiagonalScaling& dphi, const Eigen::MatrixXcd& z,
                                             const NormOptions& opts = {});

struct SplitSystem {
  Eigen::MatrixXcd matrix;
  CVector rhs;
};

// (H^T Z H, H^T v); the RWG solution is H y.
SplitSystem split_preconditioned_system(const SparseMatrix& h, const Eigen::MatrixXcd& z, const CVector& v);

}  // namespace cfie
