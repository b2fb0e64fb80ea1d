#pragma once

#include <array>
#include <vector>

namespace cfie {

// Gauss-Legendre on [0, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& gauss_legendre(int n);

// Rules on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
// A point (u, v) maps to P0 + u (P1 - P0) + v (P2 - P0).
struct TriangleRule {
  std::vector<std::array<double, 2>> uv;
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
};

// Duffy-collapsed n x n Gauss product rule, exact to degree 2n - 2.
const TriangleRule& collapsed_gauss(int n);

// 7-point degree-5 rule.
const TriangleRule& seven_point_rule();

// Product rule on a triangle pair. Weights sum to 1/4 for kernel 1.
struct PairRule {
  std::vector<std::array<double, 4>> points;  // (u, v) on the first, (u', v') on the second
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
};

// Sauter-Schwab rules for triangles sharing `common` vertices (1, 2 or 3).
// The shared vertices must come first, in the same order, in both triangles.
const PairRule& sauter_schwab(int common, int order);

}  // namespace cfie
