#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cfie/mesh.hpp"

namespace cfie {

using SparseMatrix = Eigen::SparseMatrix<double>;

// One RWG per edge. Not normalized by edge length, so the coefficient is the
// flux across the edge from the plus to the minus triangle.
struct RwgFunction {
  int edge = -1;
  int plus = -1;
  int minus = -1;
  int free_plus = -1;   // vertex of `plus` opposite the edge
  int free_minus = -1;  // vertex of `minus` opposite the edge
};

struct RwgBasis {
  SurfaceMesh mesh;
  Topology topology;
  std::vector<RwgFunction> functions;

  int size() const { return static_cast<int>(functions.size()); }
};

RwgBasis rwg_space(const SurfaceMesh& mesh, const Topology& topology);
RwgBasis rwg_space(const SurfaceMesh& mesh);

enum class BasisKind { loop, star, hloop, hstar, composite };

const char* to_string(BasisKind kind);
bool is_solenoidal(BasisKind kind);

// Maps auxiliary coefficients to RWG coefficients (rows = edges).
struct SparseTransform {
  SparseMatrix matrix;
  std::vector<int> levels;
  BasisKind kind = BasisKind::loop;
  // Composite transforms: columns [0, loop_columns) are solenoidal.
  int loop_columns = 0;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
  bool has_levels() const { return !levels.empty() && static_cast<int>(levels.size()) == cols(); }
  int max_level() const;
};

enum class ScalingKind { dyadic, jacobi };

struct DiagonalScaling {
  Eigen::VectorXd values;
  ScalingKind kind = ScalingKind::dyadic;
  double exponent = 0.0;
};

// [Sigma]_{e,c} = +1 if c is the plus triangle of e, -1 if minus.
// drop_one removes the highest-index cell of every component.
SparseTransform star_matrix(const Topology& topo, bool drop_one);

// Vertex-edge gradient incidence: [Lambda]_{e,v1} = +1, [Lambda]_{e,v0} = -1.
// Satisfies star_matrix(topo, false)^T * loop_matrix(topo, *) == 0.
SparseTransform loop_matrix(const Topology& topo, bool drop_one);

// Loops of hierarchical hat functions: level-l hats at level-l vertices,
// linearly interpolated to the finest mesh.
SparseTransform hierarchical_nodal_loops(const RefinementHierarchy& h);

// Coarse stars plus three of the four child stars of every split face.
SparseTransform hierarchical_star(const RefinementHierarchy& h);

// Multilevel stars on an arbitrary mesh by greedy dual-graph agglomeration.
SparseTransform agglomerated_hierarchical_star(const Topology& topo, int branching = 4);

// Level-l RWG coefficients -> finest-level RWG coefficients (exact flux match).
SparseMatrix coarse_to_fine_rwg(const RefinementHierarchy& h, int level);

DiagonalScaling level_scaling(const SparseTransform& t, double s);

SparseMatrix graph_laplacian(const SparseTransform& loops);

// [X * diag(loop_scale) * loop_factor, S * diag(star_scale) * star_factor].
SparseTransform concatenate(const SparseTransform& loops, const Eigen::VectorXd& loop_scale,
                            double loop_factor, const SparseTransform& stars,
                            const Eigen::VectorXd& star_scale, double star_factor);

// [X D_s / sqrt(k), S D_Sigma sqrt(k)] with dyadic level scalings.
// frequency_loops = false leaves the loop block unscaled in k.
SparseTransform composite_basis(const SparseTransform& loops, double s, const SparseTransform& stars,
                                double k, bool frequency_loops = true);

// Per-triangle divergence matrix D (N x F), [D]_{e,t} = +-1/A_t.
SparseMatrix divergence_matrix(const RwgBasis& basis);

// D^T X computed as diag(1/A) (Sigma_full^T X): exact zeros on solenoidal X.
Eigen::MatrixXd divergence_of(const RwgBasis& basis, const SparseMatrix& x);

Eigen::MatrixXd to_dense(const SparseMatrix& m);

}  // namespace cfie
