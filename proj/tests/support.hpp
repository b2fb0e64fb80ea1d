#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cfie/assembly.hpp"
#include "cfie/mesh.hpp"

namespace support {

using cfie::Vec3;
using cdouble = std::complex<double>;

inline cfie::SurfaceMesh tetrahedron(const Vec3& shift = Vec3::Zero()) {
  cfie::SurfaceMesh m;
  m.vertices = {Vec3(0, 0, 0) + shift, Vec3(1, 0, 0) + shift, Vec3(0, 1, 0) + shift, Vec3(0, 0, 1) + shift};
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

inline std::string tetrahedron_off() {
  return "OFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";
}

inline cfie::SurfaceMesh two_tetrahedra(double gap = 5.0) {
  cfie::SurfaceMesh a = tetrahedron();
  const cfie::SurfaceMesh b = tetrahedron(Vec3(gap, 0.3, -0.2));
  for (const auto& v : b.vertices) a.vertices.push_back(v);
  for (auto t : b.triangles) {
    for (int& i : t) i += 4;
    a.triangles.push_back(t);
  }
  return a;
}

inline Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& m) { return Eigen::MatrixXd(m); }

inline int rank_of(const Eigen::MatrixXd& m, double rel = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i) r += s(i) > rel * s(0);
  return r;
}

// Moore-Penrose pseudo-inverse of a symmetric matrix by eigendecomposition.
inline Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& a, double rel = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = es.eigenvalues();
  for (int i = 0; i < inv.size(); ++i) inv(i) = std::abs(inv(i)) > rel * top ? 1.0 / inv(i) : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

inline double largest_singular_value(const Eigen::MatrixXcd& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues()(0);
}

inline Eigen::MatrixXcd random_complex(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = cdouble(g(rng), g(rng));
  }
  return m;
}

// Triangle points and weights: m x m uniform split, each sub-triangle
// integrated with the degree-5 Radon 7-point rule. Weights include the area.
struct WeightedPoint {
  Vec3 x;
  double w;
};

inline std::vector<WeightedPoint> composite_points(const Vec3& p0, const Vec3& p1, const Vec3& p2, int m) {
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
  const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
  const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
  const double bary[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
                             {a2, a2, b2},                {a2, b2, a2}, {b2, a2, a2}};
  const double wts[7] = {0.225, w1, w1, w1, w2, w2, w2};
  const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm() / (m * m);
  auto at = [&](double u, double v) { return Vec3(p0 + u * (p1 - p0) + v * (p2 - p0)); };
  std::vector<WeightedPoint> out;
  auto emit = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
    for (int q = 0; q < 7; ++q) out.push_back({bary[q][0] * a + bary[q][1] * b + bary[q][2] * c, wts[q] * area});
  };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j + i < m; ++j) {
      const double u = double(i) / m, v = double(j) / m, h = 1.0 / m;
      emit(at(u, v), at(u + h, v), at(u, v + h));
      if (i + j < m - 1) emit(at(u + h, v), at(u + h, v + h), at(u, v + h));
    }
  }
  return out;
}

// Element-pair integrals written out from their definitions:
//   a(i,j) = int int (r - p_i).(r' - q_j) G / (4 A_t A_u)
//   v      = int int G
//   kt(i,j) = -int int (r - p_i).(n_t x (grad_r G x (r' - q_j))) / (4 A_t A_u)
struct PairReference {
  Eigen::Matrix3cd a = Eigen::Matrix3cd::Zero();
  Eigen::Matrix3cd kt = Eigen::Matrix3cd::Zero();
  cdouble v = 0.0;
};

inline PairReference pair_reference_at(const cfie::SurfaceMesh& mesh, int t, int u, double k, int m) {
  const auto xs = composite_points(mesh.vertex(t, 0), mesh.vertex(t, 1), mesh.vertex(t, 2), m);
  const auto ys = composite_points(mesh.vertex(u, 0), mesh.vertex(u, 1), mesh.vertex(u, 2), m);
  const Vec3 nt = (mesh.vertex(t, 1) - mesh.vertex(t, 0)).cross(mesh.vertex(t, 2) - mesh.vertex(t, 0)).normalized();
  const double scale = 1.0 / (4.0 * mesh.area(t) * mesh.area(u));
  PairReference ref;
  for (const auto& [x, wx] : xs) {
    for (const auto& [y, wy] : ys) {
      const Vec3 d = x - y;
      const double r = d.norm();
      const cdouble e = std::exp(cdouble(0.0, k * r));
      const cdouble g = e / (4.0 * M_PI * r);
      const cdouble dg = cdouble(-1.0, k * r) * e / (4.0 * M_PI * r * r * r);  // grad G = dg (r - r')
      const double w = wx * wy;
      ref.v += w * g;
      for (int i = 0; i < 3; ++i) {
        const Vec3 fi = x - mesh.vertex(t, i);
        for (int j = 0; j < 3; ++j) {
          const Vec3 fj = y - mesh.vertex(u, j);
          ref.a(i, j) += w * scale * g * fi.dot(fj);
          ref.kt(i, j) -= w * scale * dg * fi.dot(nt.cross(d.cross(fj)));
        }
      }
    }
  }
  return ref;
}

// Extrapolates the sixth-order composite rule in m, doubling m until the
// extrapolated values agree to `tol`.
inline PairReference pair_reference(const cfie::SurfaceMesh& mesh, int t, int u, double k, double tol = 1e-12) {
  auto extrapolate = [](const PairReference& c, const PairReference& f) {
    PairReference r;
    r.a = (64.0 * f.a - c.a) / 63.0;
    r.kt = (64.0 * f.kt - c.kt) / 63.0;
    r.v = (64.0 * f.v - c.v) / 63.0;
    return r;
  };
  auto gap = [](const PairReference& x, const PairReference& y) {
    return std::max({(x.a - y.a).norm() / y.a.norm(), (x.kt - y.kt).norm() / y.kt.norm(), std::abs(x.v - y.v) / std::abs(y.v)});
  };
  PairReference coarse = pair_reference_at(mesh, t, u, k, 2);
  PairReference fine = pair_reference_at(mesh, t, u, k, 4);
  PairReference best = extrapolate(coarse, fine);
  for (int m = 8; m <= 16; m *= 2) {
    coarse = fine;
    fine = pair_reference_at(mesh, t, u, k, m);
    const PairReference next = extrapolate(coarse, fine);
    const bool done = gap(next, best) < tol;
    best = next;
    if (done) break;
  }
  return best;
}

// Centroid distance over the sum of circumradii about the centroids.
inline double separation(const cfie::SurfaceMesh& mesh, int t, int u) {
  double rt = 0.0, ru = 0.0;
  for (int i = 0; i < 3; ++i) {
    rt = std::max(rt, (mesh.vertex(t, i) - mesh.centroid(t)).norm());
    ru = std::max(ru, (mesh.vertex(u, i) - mesh.centroid(u)).norm());
  }
  return (mesh.centroid(t) - mesh.centroid(u)).norm() / (rt + ru);
}

inline bool touching(const cfie::SurfaceMesh& mesh, int t, int u) {
  for (int a : mesh.triangles[t]) {
    for (int b : mesh.triangles[u]) {
      if (a == b) return true;
    }
  }
  return false;
}

inline double relative(const cdouble& x, const cdouble& ref) { return std::abs(x - ref) / std::abs(ref); }

// Worst relative error of a computed pair against the oracle. Coplanar pairs
// have kt = 0 exactly, so there it is measured on the scale of a instead.
inline double pair_error(const cfie::SurfaceMesh& mesh, int t, int u, const cfie::PairIntegrals& p,
                         const PairReference& r) {
  const bool coplanar = std::abs(std::abs(mesh.normal(t).dot(mesh.normal(u))) - 1.0) < 1e-12 &&
                        std::abs(mesh.normal(t).dot(mesh.centroid(u) - mesh.centroid(t))) < 1e-12;
  const double kt = (p.kt - r.kt).norm() / (coplanar ? r.a.norm() : r.kt.norm());
  return std::max({(p.a - r.a).norm() / r.a.norm(), kt, relative(p.v, r.v)});
}

}  // namespace support
