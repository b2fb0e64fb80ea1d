#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <queue>
#include <sstream>

#include "cfie/errors.hpp"
#include "cfie/mesh.hpp"

namespace cfie {
namespace {

// Whitespace tokenizer that drops '#' comments.
std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool comment = false;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (comment) {
      comment = c != '\n';
    } else if (c == '#') {
      flush();
      comment = true;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return tokens;
}

template <typename T>
T parse_number(const std::string& token, const char* what) {
  std::istringstream is(token);
  T value{};
  is >> value;
  if (is.fail() || !is.eof()) throw ParseError(std::string("OFF: bad ") + what + " '" + token + "'");
  return value;
}

// Flips faces so neighbours traverse shared edges in opposite directions,
// then flips whole components with negative enclosed volume.
void repair_orientation(SurfaceMesh& mesh) {
  const int nt = mesh.num_triangles();
  std::map<std::pair<int, int>, std::vector<int>> edge_faces;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      edge_faces[{std::min(a, b), std::max(a, b)}].push_back(t);
    }
  }
  for (const auto& [edge, faces] : edge_faces) {
    if (faces.size() != 2) {
      throw TopologyError("OFF: edge (" + std::to_string(edge.first) + "," +
                          std::to_string(edge.second) + ") has " + std::to_string(faces.size()) +
                          " incident triangles (expected 2)");
    }
  }

  auto traverses = [&](int t, int a, int b) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      if (tri[i] == a && tri[(i + 1) % 3] == b) return true;
    }
    return false;
  };

  std::vector<int> component(nt, -1);
  int components = 0;
  for (int seed = 0; seed < nt; ++seed) {
    if (component[seed] != -1) continue;
    std::queue<int> queue;
    queue.push(seed);
    component[seed] = components;
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop();
      const auto tri = mesh.triangles[t];
      for (int i = 0; i < 3; ++i) {
        const int a = tri[i], b = tri[(i + 1) % 3];
        const auto& faces = edge_faces[{std::min(a, b), std::max(a, b)}];
        const int other = faces[0] == t ? faces[1] : faces[0];
        const bool same_direction = traverses(other, a, b);
        if (component[other] == -1) {
          if (same_direction) std::swap(mesh.triangles[other][1], mesh.triangles[other][2]);
          component[other] = components;
          queue.push(other);
        } else if (same_direction) {
          throw TopologyError("OFF: surface is not orientable near edge (" + std::to_string(a) +
                              "," + std::to_string(b) + ")");
        }
      }
    }
    ++components;
  }

  std::vector<double> volume(components, 0.0);
  for (int t = 0; t < nt; ++t) {
    volume[component[t]] += mesh.vertex(t, 0).dot(mesh.vertex(t, 1).cross(mesh.vertex(t, 2)));
  }
  for (int t = 0; t < nt; ++t) {
    if (volume[component[t]] < 0.0) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
  }
}

}  // namespace

SurfaceMesh read_off(std::string_view text) {
  const auto tokens = tokenize(text);
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw ParseError("OFF: unexpected end of input");
    return tokens[pos++];
  };
  if (tokens.empty() || tokens[0] != "OFF") throw ParseError("OFF: missing 'OFF' header");
  ++pos;
  const int nv = parse_number<int>(next(), "vertex count");
  const int nf = parse_number<int>(next(), "face count");
  parse_number<long>(next(), "edge count");
  if (nv <= 0 || nf <= 0) throw ParseError("OFF: vertex and face counts must be positive");

  SurfaceMesh mesh;
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    const double x = parse_number<double>(next(), "coordinate");
    const double y = parse_number<double>(next(), "coordinate");
    const double z = parse_number<double>(next(), "coordinate");
    mesh.vertices.emplace_back(x, y, z);
  }
  mesh.triangles.reserve(nf);
  for (int f = 0; f < nf; ++f) {
    const int arity = parse_number<int>(next(), "face arity");
    if (arity != 3) throw ParseError("OFF: face " + std::to_string(f) + " is not a triangle");
    Triangle tri{};
    for (int& v : tri) {
      v = parse_number<int>(next(), "vertex index");
      if (v < 0 || v >= nv) throw ParseError("OFF: face " + std::to_string(f) + " index out of range");
    }
    mesh.triangles.push_back(tri);
  }
  validate_mesh(mesh);
  repair_orientation(mesh);
  return mesh;
}

SurfaceMesh read_off_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open OFF file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return read_off(buffer.str());
}

std::string write_off(const SurfaceMesh& mesh) {
  std::ostringstream os;
  os << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  return os.str();
}

void write_off_file(const SurfaceMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write OFF file " + path.string());
  out << write_off(mesh);
}

}  // namespace cfie
