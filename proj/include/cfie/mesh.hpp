#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace cfie {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

// Closed, consistently oriented triangulation. Coordinates in meters.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  const Vec3& vertex(int t, int local) const { return vertices[triangles[t][local]]; }
  Vec3 centroid(int t) const;
  // Unit normal from the stored (counter-clockwise) vertex order.
  Vec3 normal(int t) const;
  double area(int t) const;

  // Stable hash of connectivity and coordinates.
  std::uint64_t fingerprint() const;
};

// Throws std::invalid_argument on out-of-range indices or zero-area triangles.
void validate_mesh(const SurfaceMesh& mesh);

SurfaceMesh generate_cube_mesh(double side, int n);

// ASCII OFF. Orientation is repaired to a consistent outward order.
SurfaceMesh read_off(std::string_view text);
SurfaceMesh read_off_file(const std::filesystem::path& path);
std::string write_off(const SurfaceMesh& mesh);
void write_off_file(const SurfaceMesh& mesh, const std::filesystem::path& path);

// Edge stored with v0 < v1. The plus triangle traverses v0 -> v1.
struct Edge {
  int v0 = -1;
  int v1 = -1;
  int plus = -1;
  int minus = -1;
};

struct Topology {
  std::vector<Edge> edges;
  // triangle_edges[t][i] is the edge opposite local vertex i of t.
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<std::vector<int>> vertex_edges;
  std::vector<std::vector<int>> vertex_triangles;
  std::vector<int> vertex_component;
  std::vector<int> triangle_component;
  std::vector<int> component_euler;
  int num_components = 0;
  std::unordered_map<std::uint64_t, int> edge_index;

  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_vertices() const { return static_cast<int>(vertex_edges.size()); }
  int num_triangles() const { return static_cast<int>(triangle_edges.size()); }
  int euler() const;
  // True when some component is not sphere-like (Euler characteristic != 2).
  bool has_handles() const;
  // Edge index joining a and b, or -1.
  int find_edge(int a, int b) const;
  // +1 when t is the plus triangle of e, -1 when minus.
  int edge_sign(int e, int t) const { return edges[e].plus == t ? 1 : -1; }
};

Topology build_topology(const SurfaceMesh& mesh);

// Maps level l entities to level l + 1.
struct LevelGenealogy {
  // Children ordered: corner at local vertex 0, 1, 2, then the center face.
  std::vector<std::array<int, 4>> face_children;
  std::vector<std::array<int, 2>> edge_children;
  std::vector<int> edge_midpoint;
  // Fine face -> coarse face.
  std::vector<int> face_parent;
  // Fine edges interior to a coarse face -> that face, otherwise -1.
  std::vector<int> interior_edge_face;
};

struct RefinementHierarchy {
  std::vector<SurfaceMesh> meshes;
  std::vector<Topology> topologies;
  std::vector<LevelGenealogy> genealogy;
  // Level at which each finest-level vertex / edge first appears.
  std::vector<int> vertex_level;
  std::vector<int> edge_level;

  int depth() const { return static_cast<int>(meshes.size()) - 1; }
  const SurfaceMesh& fine() const { return meshes.back(); }
  const Topology& fine_topology() const { return topologies.back(); }
  // Ancestor at level `level` of a face living at level `from`.
  int face_ancestor(int from, int face, int level) const;
};

RefinementHierarchy dyadic_refine(const SurfaceMesh& coarse, int levels,
                                  bool reproject_to_sphere = false);

struct MeshStatistics {
  int V = 0;
  int E = 0;
  int F = 0;
  int euler = 0;
  double h_avg = 0.0;
  double h_min = 0.0;
  double total_area = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};

MeshStatistics mesh_statistics(const SurfaceMesh& mesh);

}  // namespace cfie
