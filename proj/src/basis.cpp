#include "cfie/basis.hpp"

#include <algorithm>
#include <cmath>

#include "cfie/errors.hpp"

namespace cfie {
namespace {

using Triplet = Eigen::Triplet<double>;

void require_genus_zero(const Topology& topo) {
  if (topo.has_handles()) {
    throw UnsupportedGeometry("surface has genus > 0; global loops are not supported");
  }
}

// Highest index per component, for a per-entity component labelling.
std::vector<bool> dropped_entities(const std::vector<int>& component, int num_components) {
  std::vector<int> last(num_components, -1);
  for (int i = 0; i < static_cast<int>(component.size()); ++i) last[component[i]] = i;
  std::vector<bool> drop(component.size(), false);
  for (int i : last) drop[i] = true;
  return drop;
}

}  // namespace

const char* to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::loop: return "loop";
    case BasisKind::star: return "star";
    case BasisKind::hloop: return "h-loop";
    case BasisKind::hstar: return "h-n-sol";
    case BasisKind::composite: return "composite";
  }
  return "?";
}

bool is_solenoidal(BasisKind kind) { return kind == BasisKind::loop || kind == BasisKind::hloop; }

int SparseTransform::max_level() const {
  return levels.empty() ? 0 : *std::max_element(levels.begin(), levels.end());
}

RwgBasis rwg_space(const SurfaceMesh& mesh, const Topology& topology) {
  RwgBasis basis;
  basis.mesh = mesh;
  basis.topology = topology;
  basis.functions.reserve(topology.num_edges());
  auto free_vertex = [&](int t, int e) {
    for (int i = 0; i < 3; ++i) {
      if (topology.triangle_edges[t][i] == e) return mesh.triangles[t][i];
    }
    return -1;
  };
  for (int e = 0; e < topology.num_edges(); ++e) {
    const Edge& edge = topology.edges[e];
    if (edge.plus < 0 || edge.minus < 0) throw UnsupportedGeometry("open surface edge in rwg_space");
    if (edge.plus == edge.minus) throw TopologyError("edge " + std::to_string(e) + " has plus == minus");
    basis.functions.push_back({e, edge.plus, edge.minus, free_vertex(edge.plus, e),
                               free_vertex(edge.minus, e)});
  }
  return basis;
}

RwgBasis rwg_space(const SurfaceMesh& mesh) { return rwg_space(mesh, build_topology(mesh)); }

SparseTransform star_matrix(const Topology& topo, bool drop_one) {
  require_genus_zero(topo);
  const int nt = topo.num_triangles();
  std::vector<bool> drop(nt, false);
  if (drop_one) drop = dropped_entities(topo.triangle_component, topo.num_components);
  std::vector<int> column(nt, -1);
  int cols = 0;
  for (int t = 0; t < nt; ++t) {
    if (!drop[t]) column[t] = cols++;
  }
  std::vector<Triplet> entries;
  entries.reserve(2 * topo.num_edges());
  for (int e = 0; e < topo.num_edges(); ++e) {
    const Edge& edge = topo.edges[e];
    if (column[edge.plus] >= 0) entries.emplace_back(e, column[edge.plus], 1.0);
    if (column[edge.minus] >= 0) entries.emplace_back(e, column[edge.minus], -1.0);
  }
  SparseTransform out;
  out.kind = BasisKind::star;
  out.matrix.resize(topo.num_edges(), cols);
  out.matrix.setFromTriplets(entries.begin(), entries.end());
  out.levels.assign(cols, 0);
  return out;
}

SparseTransform loop_matrix(const Topology& topo, bool drop_one) {
  require_genus_zero(topo);
  const int nv = topo.num_vertices();
  std::vector<bool> drop(nv, false);
  if (drop_one) drop = dropped_entities(topo.vertex_component, topo.num_components);
  std::vector<int> column(nv, -1);
  int cols = 0;
  for (int v = 0; v < nv; ++v) {
    if (!drop[v]) column[v] = cols++;
  }
  std::vector<Triplet> entries;
  entries.reserve(2 * topo.num_edges());
  for (int e = 0; e < topo.num_edges(); ++e) {
    const Edge& edge = topo.edges[e];
    if (column[edge.v1] >= 0) entries.emplace_back(e, column[edge.v1], 1.0);
    if (column[edge.v0] >= 0) entries.emplace_back(e, column[edge.v0], -1.0);
  }
  SparseTransform out;
  out.kind = BasisKind::loop;
  out.matrix.resize(topo.num_edges(), cols);
  out.matrix.setFromTriplets(entries.begin(), entries.end());
  out.levels.assign(cols, 0);
  return out;
}

DiagonalScaling level_scaling(const SparseTransform& t, double s) {
  if (!t.has_levels()) throw_invalid("level_scaling: transform has no level indices");
  DiagonalScaling d;
  d.values.resize(t.cols());
  if (is_solenoidal(t.kind)) {
    d.exponent = s;
    for (int i = 0; i < t.cols(); ++i) d.values[i] = std::exp2(s * t.levels[i]);
  } else if (t.kind == BasisKind::star || t.kind == BasisKind::hstar) {
    d.exponent = -1.0;
    for (int i = 0; i < t.cols(); ++i) d.values[i] = std::exp2(-static_cast<double>(t.levels[i]));
  } else {
    throw_invalid("level_scaling: composite transforms carry no single scaling rule");
  }
  return d;
}

SparseMatrix graph_laplacian(const SparseTransform& loops) {
  if (!is_solenoidal(loops.kind)) throw_invalid("graph_laplacian expects a loop transform");
  SparseMatrix l = SparseMatrix(loops.matrix.transpose()) * loops.matrix;
  l.makeCompressed();
  return l;
}

SparseTransform concatenate(const SparseTransform& loops, const Eigen::VectorXd& loop_scale,
                            double loop_factor, const SparseTransform& stars,
                            const Eigen::VectorXd& star_scale, double star_factor) {
  if (loops.rows() != stars.rows()) throw_invalid("concatenate: row dimensions differ");
  if (loop_scale.size() != loops.cols() || star_scale.size() != stars.cols()) {
    throw_invalid("concatenate: scaling length does not match column count");
  }
  std::vector<Triplet> entries;
  entries.reserve(loops.matrix.nonZeros() + stars.matrix.nonZeros());
  for (int c = 0; c < loops.cols(); ++c) {
    for (SparseMatrix::InnerIterator it(loops.matrix, c); it; ++it) {
      entries.emplace_back(it.row(), c, it.value() * loop_scale[c] * loop_factor);
    }
  }
  for (int c = 0; c < stars.cols(); ++c) {
    for (SparseMatrix::InnerIterator it(stars.matrix, c); it; ++it) {
      entries.emplace_back(it.row(), loops.cols() + c, it.value() * star_scale[c] * star_factor);
    }
  }
  SparseTransform out;
  out.kind = BasisKind::composite;
  out.loop_columns = loops.cols();
  out.matrix.resize(loops.rows(), loops.cols() + stars.cols());
  out.matrix.setFromTriplets(entries.begin(), entries.end());
  if (loops.has_levels() && stars.has_levels()) {
    out.levels = loops.levels;
    out.levels.insert(out.levels.end(), stars.levels.begin(), stars.levels.end());
  }
  return out;
}

SparseTransform composite_basis(const SparseTransform& loops, double s, const SparseTransform& stars,
                                double k, bool frequency_loops) {
  if (!(k > 0.0)) throw_invalid("composite_basis: k must be positive");
  const double sk = std::sqrt(k);
  return concatenate(loops, level_scaling(loops, s).values, frequency_loops ? 1.0 / sk : 1.0, stars,
                     level_scaling(stars, 0.0).values, sk);
}

SparseMatrix divergence_matrix(const RwgBasis& basis) {
  std::vector<Triplet> entries;
  entries.reserve(2 * basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    const auto& f = basis.functions[i];
    entries.emplace_back(i, f.plus, 1.0 / basis.mesh.area(f.plus));
    entries.emplace_back(i, f.minus, -1.0 / basis.mesh.area(f.minus));
  }
  SparseMatrix d(basis.size(), basis.mesh.num_triangles());
  d.setFromTriplets(entries.begin(), entries.end());
  return d;
}

Eigen::MatrixXd divergence_of(const RwgBasis& basis, const SparseMatrix& x) {
  if (x.rows() != basis.size()) throw_invalid("divergence_of: row count mismatch");
  // Integer sums first, one division per row last.
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(basis.mesh.num_triangles(), x.cols());
  for (int c = 0; c < x.cols(); ++c) {
    for (SparseMatrix::InnerIterator it(x, c); it; ++it) {
      const auto& f = basis.functions[it.row()];
      out(f.plus, c) += it.value();
      out(f.minus, c) -= it.value();
    }
  }
  for (int t = 0; t < basis.mesh.num_triangles(); ++t) out.row(t) /= basis.mesh.area(t);
  return out;
}

Eigen::MatrixXd to_dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

}  // namespace cfie
