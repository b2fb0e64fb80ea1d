#include "cfie/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "cfie/errors.hpp"

namespace cfie {
namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

// FNV-1a over raw bytes.
void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

Vec3 SurfaceMesh::centroid(int t) const {
  return (vertex(t, 0) + vertex(t, 1) + vertex(t, 2)) / 3.0;
}

Vec3 SurfaceMesh::normal(int t) const {
  const Vec3 n = (vertex(t, 1) - vertex(t, 0)).cross(vertex(t, 2) - vertex(t, 0));
  return n.normalized();
}

double SurfaceMesh::area(int t) const {
  return 0.5 * (vertex(t, 1) - vertex(t, 0)).cross(vertex(t, 2) - vertex(t, 0)).norm();
}

std::uint64_t SurfaceMesh::fingerprint() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& v : vertices) hash_bytes(h, v.data(), 3 * sizeof(double));
  for (const auto& t : triangles) hash_bytes(h, t.data(), 3 * sizeof(int));
  return h;
}

void validate_mesh(const SurfaceMesh& mesh) {
  if (mesh.triangles.empty()) throw_invalid("mesh has no triangles");
  const int nv = mesh.num_vertices();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) {
        throw_invalid("triangle " + std::to_string(t) + " references vertex " +
                      std::to_string(v) + " out of range");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] || !(mesh.area(t) > 0.0)) {
      throw_invalid("triangle " + std::to_string(t) + " is degenerate");
    }
  }
}

SurfaceMesh generate_cube_mesh(double side, int n) {
  if (!(side > 0.0)) throw_invalid("cube side must be positive");
  if (n < 1) throw_invalid("cube subdivision count must be >= 1");

  using Lattice = std::tuple<int, int, int>;
  std::map<Lattice, int> index;
  SurfaceMesh mesh;
  auto vertex_id = [&](const std::array<int, 3>& p) {
    const Lattice key{p[0], p[1], p[2]};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = mesh.num_vertices();
    index.emplace(key, id);
    mesh.vertices.emplace_back(side * (static_cast<double>(p[0]) / n - 0.5),
                               side * (static_cast<double>(p[1]) / n - 0.5),
                               side * (static_cast<double>(p[2]) / n - 0.5));
    return id;
  };

  // Each face: fixed axis and value, in-plane axes (u, v) with u x v outward.
  struct Face {
    int fixed;
    int value;
    int u;
    int v;
  };
  const std::array<Face, 6> faces{{{0, 0, 2, 1},
                                   {0, n, 1, 2},
                                   {1, 0, 0, 2},
                                   {1, n, 2, 0},
                                   {2, 0, 1, 0},
                                   {2, n, 0, 1}}};
  for (const auto& face : faces) {
    auto lattice = [&](int a, int b) {
      std::array<int, 3> p{};
      p[face.fixed] = face.value;
      p[face.u] = a;
      p[face.v] = b;
      return vertex_id(p);
    };
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < n; ++a) {
        const int p00 = lattice(a, b);
        const int p10 = lattice(a + 1, b);
        const int p11 = lattice(a + 1, b + 1);
        const int p01 = lattice(a, b + 1);
        mesh.triangles.push_back({p00, p10, p11});
        mesh.triangles.push_back({p00, p11, p01});
      }
    }
  }
  return mesh;
}

int Topology::euler() const {
  return std::accumulate(component_euler.begin(), component_euler.end(), 0);
}

bool Topology::has_handles() const {
  return std::any_of(component_euler.begin(), component_euler.end(),
                     [](int chi) { return chi != 2; });
}

int Topology::find_edge(int a, int b) const {
  auto it = edge_index.find(edge_key(a, b));
  return it == edge_index.end() ? -1 : it->second;
}

Topology build_topology(const SurfaceMesh& mesh) {
  validate_mesh(mesh);
  Topology topo;
  const int nv = mesh.num_vertices();
  const int nt = mesh.num_triangles();
  topo.triangle_edges.resize(nt);
  topo.vertex_edges.resize(nv);
  topo.vertex_triangles.resize(nv);

  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      const auto key = edge_key(a, b);
      auto [it, inserted] = topo.edge_index.try_emplace(key, topo.num_edges());
      if (inserted) {
        Edge e;
        e.v0 = std::min(a, b);
        e.v1 = std::max(a, b);
        topo.edges.push_back(e);
        topo.vertex_edges[e.v0].push_back(it->second);
        topo.vertex_edges[e.v1].push_back(it->second);
      }
      Edge& e = topo.edges[it->second];
      int& slot = (a == e.v0) ? e.plus : e.minus;
      if (slot != -1) {
        const bool third = e.plus != -1 && e.minus != -1;
        throw TopologyError("edge (" + std::to_string(e.v0) + "," + std::to_string(e.v1) + ") " +
                            (third ? "is shared by more than two triangles"
                                   : "is traversed in the same direction twice"));
      }
      slot = t;
      topo.triangle_edges[t][i] = it->second;
    }
    for (int v : tri) topo.vertex_triangles[v].push_back(t);
  }

  for (const auto& e : topo.edges) {
    if (e.plus == -1 || e.minus == -1) {
      throw UnsupportedGeometry("open boundary edge (" + std::to_string(e.v0) + "," +
                                std::to_string(e.v1) + "); only closed surfaces are supported");
    }
  }

  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& tri : mesh.triangles) {
    const int r0 = find_root(parent, tri[0]);
    for (int i = 1; i < 3; ++i) {
      const int ri = find_root(parent, tri[i]);
      if (ri != r0) parent[ri] = r0;
    }
  }
  std::vector<int> label(nv, -1);
  topo.vertex_component.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (topo.vertex_triangles[v].empty()) {
      throw TopologyError("vertex " + std::to_string(v) + " is not used by any triangle");
    }
    const int r = find_root(parent, v);
    if (label[r] == -1) label[r] = topo.num_components++;
    topo.vertex_component[v] = label[r];
  }
  topo.triangle_component.resize(nt);
  std::vector<int> counts_v(topo.num_components, 0), counts_e(topo.num_components, 0),
      counts_f(topo.num_components, 0);
  for (int v = 0; v < nv; ++v) ++counts_v[topo.vertex_component[v]];
  for (const auto& e : topo.edges) ++counts_e[topo.vertex_component[e.v0]];
  for (int t = 0; t < nt; ++t) {
    topo.triangle_component[t] = topo.vertex_component[mesh.triangles[t][0]];
    ++counts_f[topo.triangle_component[t]];
  }
  topo.component_euler.resize(topo.num_components);
  for (int c = 0; c < topo.num_components; ++c) {
    topo.component_euler[c] = counts_v[c] - counts_e[c] + counts_f[c];
  }
  return topo;
}

std::string MeshStatistics::csv_header() { return "V,E,F,euler,h_avg,h_min,area"; }

std::string MeshStatistics::csv_row() const {
  std::ostringstream os;
  os.precision(12);
  os << V << ',' << E << ',' << F << ',' << euler << ',' << h_avg << ',' << h_min << ','
     << total_area;
  return os.str();
}

MeshStatistics mesh_statistics(const SurfaceMesh& mesh) {
  validate_mesh(mesh);
  std::set<std::uint64_t> edges;
  for (const auto& tri : mesh.triangles) {
    for (int i = 0; i < 3; ++i) edges.insert(edge_key(tri[i], tri[(i + 1) % 3]));
  }
  MeshStatistics s;
  s.V = mesh.num_vertices();
  s.F = mesh.num_triangles();
  s.E = static_cast<int>(edges.size());
  s.euler = s.V - s.E + s.F;
  double sum = 0.0;
  s.h_min = std::numeric_limits<double>::infinity();
  for (auto key : edges) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffULL);
    const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
    sum += len;
    s.h_min = std::min(s.h_min, len);
  }
  s.h_avg = sum / s.E;
  for (int t = 0; t < mesh.num_triangles(); ++t) s.total_area += mesh.area(t);
  return s;
}

}  // namespace cfie
