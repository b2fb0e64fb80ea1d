#include <numeric>

#include "cfie/errors.hpp"
#include "cfie/mesh.hpp"

namespace cfie {

int RefinementHierarchy::face_ancestor(int from, int face, int level) const {
  if (level < 0 || level > from || from > depth()) throw_invalid("face_ancestor: bad level range");
  while (from > level) {
    face = genealogy[from - 1].face_parent[face];
    --from;
  }
  return face;
}

RefinementHierarchy dyadic_refine(const SurfaceMesh& coarse, int levels, bool reproject_to_sphere) {
  if (levels < 0) throw_invalid("refinement level count must be >= 0");
  RefinementHierarchy h;
  h.meshes.push_back(coarse);
  h.topologies.push_back(build_topology(coarse));

  double radius = 0.0;
  if (reproject_to_sphere) {
    for (const auto& v : coarse.vertices) radius += v.norm();
    radius /= coarse.num_vertices();
  }

  h.vertex_level.assign(coarse.num_vertices(), 0);
  h.edge_level.assign(h.topologies[0].num_edges(), 0);

  for (int l = 0; l < levels; ++l) {
    const SurfaceMesh& mesh = h.meshes[l];
    const Topology& topo = h.topologies[l];
    const int nv = mesh.num_vertices();
    const int ne = topo.num_edges();
    const int nf = mesh.num_triangles();

    SurfaceMesh fine;
    fine.vertices = mesh.vertices;
    fine.vertices.reserve(nv + ne);
    for (const auto& e : topo.edges) {
      Vec3 m = 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
      if (reproject_to_sphere) m *= radius / m.norm();
      fine.vertices.push_back(m);
    }

    LevelGenealogy g;
    g.face_children.resize(nf);
    g.face_parent.resize(4 * nf);
    g.edge_midpoint.resize(ne);
    for (int e = 0; e < ne; ++e) g.edge_midpoint[e] = nv + e;

    fine.triangles.reserve(4 * nf);
    for (int t = 0; t < nf; ++t) {
      const auto& tri = mesh.triangles[t];
      const auto& te = topo.triangle_edges[t];
      const int m12 = nv + te[0];
      const int m20 = nv + te[1];
      const int m01 = nv + te[2];
      fine.triangles.push_back({tri[0], m01, m20});
      fine.triangles.push_back({m01, tri[1], m12});
      fine.triangles.push_back({m20, m12, tri[2]});
      fine.triangles.push_back({m01, m12, m20});
      for (int k = 0; k < 4; ++k) {
        g.face_children[t][k] = 4 * t + k;
        g.face_parent[4 * t + k] = t;
      }
    }

    Topology fine_topo = build_topology(fine);
    g.edge_children.resize(ne);
    for (int e = 0; e < ne; ++e) {
      const auto& edge = topo.edges[e];
      g.edge_children[e] = {fine_topo.find_edge(edge.v0, nv + e), fine_topo.find_edge(nv + e, edge.v1)};
    }
    g.interior_edge_face.assign(fine_topo.num_edges(), -1);
    for (int t = 0; t < nf; ++t) {
      const auto& te = topo.triangle_edges[t];
      for (int i = 0; i < 3; ++i) {
        g.interior_edge_face[fine_topo.find_edge(nv + te[i], nv + te[(i + 1) % 3])] = t;
      }
    }

    std::vector<int> edge_level(fine_topo.num_edges(), l + 1);
    for (int e = 0; e < ne; ++e) {
      for (int c : g.edge_children[e]) edge_level[c] = h.edge_level[e];
    }
    h.edge_level = std::move(edge_level);
    h.vertex_level.resize(nv + ne, l + 1);

    h.genealogy.push_back(std::move(g));
    h.meshes.push_back(std::move(fine));
    h.topologies.push_back(std::move(fine_topo));
  }
  return h;
}

}  // namespace cfie
