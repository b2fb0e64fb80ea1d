#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "cfie/basis.hpp"
#include "cfie/errors.hpp"

namespace cfie {
namespace {

using Triplet = Eigen::Triplet<double>;

void check_hierarchy(const RefinementHierarchy& h) {
  if (h.meshes.empty() || h.topologies.size() != h.meshes.size() ||
      h.genealogy.size() + 1 != h.meshes.size()) {
    throw_invalid("refinement hierarchy is incomplete");
  }
  for (int l = 0; l < h.depth(); ++l) {
    if (h.meshes[l + 1].num_triangles() != 4 * h.meshes[l].num_triangles() ||
        h.meshes[l + 1].num_vertices() != h.meshes[l].num_vertices() + h.topologies[l].num_edges()) {
      throw_invalid("refinement hierarchy is not dyadic at level " + std::to_string(l));
    }
  }
  if (h.topologies[0].has_handles()) {
    throw UnsupportedGeometry("surface has genus > 0; global loops are not supported");
  }
}

// Nodal interpolation V_l -> V_{l+1}: midpoints average their edge endpoints.
SparseMatrix nodal_prolongation(const RefinementHierarchy& h, int l) {
  const int nv = h.meshes[l].num_vertices();
  const auto& edges = h.topologies[l].edges;
  std::vector<Triplet> entries;
  entries.reserve(nv + 2 * edges.size());
  for (int v = 0; v < nv; ++v) entries.emplace_back(v, v, 1.0);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    entries.emplace_back(nv + e, edges[e].v0, 0.5);
    entries.emplace_back(nv + e, edges[e].v1, 0.5);
  }
  SparseMatrix p(nv + static_cast<int>(edges.size()), nv);
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

// RWG coefficients E_l -> E_{l+1}. Fluxes are multiples of 1/4 and are
// evaluated in the coarse face geometry, then snapped.
SparseMatrix rwg_prolongation(const RefinementHierarchy& h, int l) {
  const SurfaceMesh& coarse = h.meshes[l];
  const Topology& ct = h.topologies[l];
  const Topology& ft = h.topologies[l + 1];
  const LevelGenealogy& g = h.genealogy[l];
  const int nv = coarse.num_vertices();

  auto coarse_position = [&](int u) -> Vec3 {
    if (u < nv) return coarse.vertices[u];
    const Edge& e = ct.edges[u - nv];
    return 0.5 * (coarse.vertices[e.v0] + coarse.vertices[e.v1]);
  };
  // Flux of the coarse RWG `ce` restricted to face T across fine edge `fe`,
  // oriented along the fine plus -> minus direction.
  auto flux = [&](int ce, int T, int fe) {
    const Edge& fine_edge = ft.edges[fe];
    const Vec3 a = coarse_position(fine_edge.v0);
    const Vec3 b = coarse_position(fine_edge.v1);
    const auto& te = ct.triangle_edges[T];
    const int local = static_cast<int>(std::find(te.begin(), te.end(), ce) - te.begin());
    const Vec3 p = coarse.vertex(T, local);
    const Vec3 n = coarse.normal(T);
    const double value = ct.edge_sign(ce, T) * (0.5 * (a + b) - p).dot((b - a).cross(n)) /
                         (2.0 * coarse.area(T));
    return std::round(4.0 * value) / 4.0;
  };

  std::vector<Triplet> entries;
  entries.reserve(2 * ct.num_edges() + 9 * coarse.num_triangles());
  for (int ce = 0; ce < ct.num_edges(); ++ce) {
    for (int fe : g.edge_children[ce]) entries.emplace_back(fe, ce, flux(ce, g.face_parent[ft.edges[fe].plus], fe));
  }
  for (int fe = 0; fe < ft.num_edges(); ++fe) {
    const int T = g.interior_edge_face[fe];
    if (T < 0) continue;
    for (int ce : ct.triangle_edges[T]) {
      const double v = flux(ce, T, fe);
      if (v != 0.0) entries.emplace_back(fe, ce, v);
    }
  }
  SparseMatrix r(ft.num_edges(), ct.num_edges());
  r.setFromTriplets(entries.begin(), entries.end());
  return r;
}

SparseMatrix select_columns(int rows, const std::vector<int>& cols) {
  std::vector<Triplet> entries;
  entries.reserve(cols.size());
  for (int c = 0; c < static_cast<int>(cols.size()); ++c) entries.emplace_back(cols[c], c, 1.0);
  SparseMatrix s(rows, static_cast<int>(cols.size()));
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

SparseMatrix hcat(const std::vector<SparseMatrix>& blocks, int rows) {
  std::vector<Triplet> entries;
  int offset = 0;
  for (const auto& b : blocks) {
    for (int c = 0; c < b.cols(); ++c) {
      for (SparseMatrix::InnerIterator it(b, c); it; ++it) entries.emplace_back(it.row(), offset + c, it.value());
    }
    offset += static_cast<int>(b.cols());
  }
  SparseMatrix out(rows, offset);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

}  // namespace

SparseMatrix coarse_to_fine_rwg(const RefinementHierarchy& h, int level) {
  if (level < 0 || level > h.depth()) throw_invalid("coarse_to_fine_rwg: level out of range");
  const int n = h.topologies[level].num_edges();
  SparseMatrix p(n, n);
  p.setIdentity();
  for (int l = level; l < h.depth(); ++l) p = rwg_prolongation(h, l) * p;
  p.makeCompressed();
  return p;
}

SparseTransform hierarchical_nodal_loops(const RefinementHierarchy& h) {
  check_hierarchy(h);
  const int depth = h.depth();
  const SparseMatrix fine_loops = loop_matrix(h.fine_topology(), false).matrix;

  std::vector<SparseMatrix> blocks;
  std::vector<int> levels;
  for (int l = 0; l <= depth; ++l) {
    const int nv = h.meshes[l].num_vertices();
    std::vector<int> verts;
    if (l == 0) {
      const Topology& topo = h.topologies[0];
      std::vector<int> last(topo.num_components, -1);
      for (int v = 0; v < nv; ++v) last[topo.vertex_component[v]] = v;
      for (int v = 0; v < nv; ++v) {
        if (std::find(last.begin(), last.end(), v) == last.end()) verts.push_back(v);
      }
    } else {
      for (int v = h.meshes[l - 1].num_vertices(); v < nv; ++v) verts.push_back(v);
    }
    SparseMatrix hats = select_columns(nv, verts);
    for (int m = l; m < depth; ++m) hats = nodal_prolongation(h, m) * hats;
    blocks.push_back(fine_loops * hats);
    levels.insert(levels.end(), verts.size(), l);
  }
  SparseTransform out;
  out.kind = BasisKind::hloop;
  out.matrix = hcat(blocks, h.fine_topology().num_edges());
  out.levels = std::move(levels);
  return out;
}

SparseTransform hierarchical_star(const RefinementHierarchy& h) {
  check_hierarchy(h);
  const int depth = h.depth();
  std::vector<SparseMatrix> blocks;
  std::vector<int> levels;

  const SparseTransform coarse = star_matrix(h.topologies[0], true);
  blocks.push_back(coarse_to_fine_rwg(h, 0) * coarse.matrix);
  levels.insert(levels.end(), coarse.cols(), 0);
  for (int l = 1; l <= depth; ++l) {
    std::vector<int> faces;
    for (const auto& children : h.genealogy[l - 1].face_children) {
      faces.insert(faces.end(), children.begin(), children.begin() + 3);
    }
    const SparseMatrix stars = star_matrix(h.topologies[l], false).matrix *
                               select_columns(h.meshes[l].num_triangles(), faces);
    blocks.push_back(coarse_to_fine_rwg(h, l) * stars);
    levels.insert(levels.end(), faces.size(), l);
  }
  SparseTransform out;
  out.kind = BasisKind::hstar;
  out.matrix = hcat(blocks, h.fine_topology().num_edges());
  out.levels = std::move(levels);
  return out;
}

SparseTransform agglomerated_hierarchical_star(const Topology& topo, int branching) {
  if (branching < 2) throw_invalid("agglomeration branching must be >= 2");
  if (topo.has_handles()) throw UnsupportedGeometry("surface has genus > 0");
  const int nf = topo.num_triangles();

  std::vector<std::vector<int>> face_neighbors(nf);
  for (const auto& e : topo.edges) {
    face_neighbors[e.plus].push_back(e.minus);
    face_neighbors[e.minus].push_back(e.plus);
  }

  // clusters[i] lists faces; each grouping pass records parent -> children.
  std::vector<std::vector<int>> clusters(nf);
  for (int t = 0; t < nf; ++t) clusters[t] = {t};
  std::vector<std::vector<std::vector<int>>> passes;
  std::vector<std::vector<std::vector<int>>> pass_clusters;

  auto component_of = [&](const std::vector<int>& cluster) { return topo.triangle_component[cluster[0]]; };

  while (true) {
    const int nc = static_cast<int>(clusters.size());
    std::vector<int> per_component(topo.num_components, 0);
    for (const auto& c : clusters) ++per_component[component_of(c)];
    if (std::all_of(per_component.begin(), per_component.end(), [&](int n) { return n <= branching; })) break;

    std::vector<int> owner(nf);
    for (int c = 0; c < nc; ++c) {
      for (int t : clusters[c]) owner[t] = c;
    }
    std::vector<std::vector<int>> adjacent(nc);
    for (int c = 0; c < nc; ++c) {
      std::set<int> s;
      for (int t : clusters[c]) {
        for (int u : face_neighbors[t]) {
          if (owner[u] != c) s.insert(owner[u]);
        }
      }
      adjacent[c].assign(s.begin(), s.end());
    }

    std::vector<int> parent(nc, -1);
    std::vector<std::vector<int>> parents;
    for (int seed = 0; seed < nc; ++seed) {
      if (parent[seed] != -1) continue;
      const int p = static_cast<int>(parents.size());
      parents.emplace_back();
      if (per_component[component_of(clusters[seed])] <= branching) {
        parent[seed] = p;
        parents[p].push_back(seed);
        continue;
      }
      std::queue<int> queue;
      queue.push(seed);
      while (!queue.empty() && static_cast<int>(parents[p].size()) < branching) {
        const int c = queue.front();
        queue.pop();
        if (parent[c] != -1) continue;
        parent[c] = p;
        parents[p].push_back(c);
        for (int d : adjacent[c]) {
          if (parent[d] == -1) queue.push(d);
        }
      }
    }
    // Single-child parents in grouped components join a neighbouring parent.
    for (int p = 0; p < static_cast<int>(parents.size()); ++p) {
      if (parents[p].size() != 1) continue;
      const int c = parents[p][0];
      if (per_component[component_of(clusters[c])] <= branching) continue;
      int target = -1;
      for (int d : adjacent[c]) {
        if (parent[d] != p && (target == -1 || parent[d] < target)) target = parent[d];
      }
      if (target == -1) continue;
      parents[target].push_back(c);
      parent[c] = target;
      parents[p].clear();
    }
    parents.erase(std::remove_if(parents.begin(), parents.end(), [](const auto& p) { return p.empty(); }),
                  parents.end());

    std::vector<std::vector<int>> next(parents.size());
    for (std::size_t p = 0; p < parents.size(); ++p) {
      for (int c : parents[p]) next[p].insert(next[p].end(), clusters[c].begin(), clusters[c].end());
    }
    passes.push_back(parents);
    pass_clusters.push_back(std::move(clusters));
    clusters = std::move(next);
  }

  auto generalized_star = [&](const std::vector<int>& faces) {
    std::map<int, double> column;
    for (int t : faces) {
      for (int e : topo.triangle_edges[t]) column[e] += topo.edge_sign(e, t);
    }
    return column;
  };

  std::vector<Triplet> entries;
  std::vector<int> levels;
  int col = 0;
  auto emit = [&](const std::vector<std::vector<int>>& pool, const std::vector<int>& children, int level) {
    for (std::size_t j = 0; j + 1 < children.size(); ++j) {
      const auto& a = pool[children[j]];
      const auto& b = pool[children[j + 1]];
      const double ratio = static_cast<double>(a.size()) / static_cast<double>(b.size());
      std::map<int, double> column = generalized_star(a);
      for (const auto& [e, v] : generalized_star(b)) column[e] -= ratio * v;
      for (const auto& [e, v] : column) {
        if (v != 0.0) entries.emplace_back(e, col, v);
      }
      levels.push_back(level);
      ++col;
    }
  };

  // Root: top-level clusters of each component.
  std::vector<std::vector<int>> roots(topo.num_components);
  for (int c = 0; c < static_cast<int>(clusters.size()); ++c) roots[component_of(clusters[c])].push_back(c);
  for (const auto& r : roots) emit(clusters, r, 0);
  const int npass = static_cast<int>(passes.size());
  for (int g = npass - 1; g >= 0; --g) {
    for (const auto& children : passes[g]) emit(pass_clusters[g], children, npass - g);
  }

  SparseTransform out;
  out.kind = BasisKind::hstar;
  out.matrix.resize(topo.num_edges(), col);
  out.matrix.setFromTriplets(entries.begin(), entries.end());
  out.levels = std::move(levels);
  return out;
}

}  // namespace cfie
