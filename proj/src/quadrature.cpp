#include "cfie/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "cfie/errors.hpp"

namespace cfie {
namespace {

// Recursive: building one rule may request another.
std::recursive_mutex cache_mutex;

GaussRule build_gauss(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  // Newton on P_n from the Chebyshev initial guess, then map [-1,1] -> [0,1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.x[n - 1 - i] = 0.5 * (x + 1.0);
    rule.w[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

TriangleRule build_collapsed(int n) {
  const GaussRule& g = gauss_legendre(n);
  TriangleRule rule;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.x[i];
      rule.uv.push_back({u, g.x[j] * (1.0 - u)});
      rule.w.push_back(g.w[i] * g.w[j] * (1.0 - u));
    }
  }
  return rule;
}

// Reference rules use {0 <= x2 <= x1 <= 1}; convert to (u, v) = (x1 - x2, x2).
void push(PairRule& rule, double x1, double x2, double y1, double y2, double w) {
  rule.points.push_back({x1 - x2, x2, y1 - y2, y2});
  rule.w.push_back(w);
}

PairRule build_sauter_schwab(int common, int order) {
  const GaussRule& g = gauss_legendre(order);
  PairRule rule;
  for (int a = 0; a < order; ++a) {
    const double xi = g.x[a];
    for (int b = 0; b < order; ++b) {
      const double e3 = g.x[b];
      for (int c = 0; c < order; ++c) {
        const double e2 = g.x[c];
        for (int d = 0; d < order; ++d) {
          const double e1 = g.x[d];
          const double w = g.w[a] * g.w[b] * g.w[c] * g.w[d];
          if (common == 3) {
            const double lw = w * xi * xi * xi * e1 * e1 * e2;
            push(rule, xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), lw);
            push(rule, xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), lw);
            push(rule, xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), lw);
            push(rule, xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), lw);
            push(rule, xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), lw);
            push(rule, xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), lw);
          } else if (common == 2) {
            const double lw = w * xi * xi * xi * e1 * e1 * e2;
            push(rule, xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2), w * xi * xi * xi * e1 * e1);
            push(rule, xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), lw);
            push(rule, xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, lw);
            push(rule, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, lw);
            push(rule, xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, lw);
          } else {
            const double lw = w * xi * xi * xi * e2;
            push(rule, xi, xi * e1, xi * e2, xi * e2 * e3, lw);
            push(rule, xi * e2, xi * e2 * e3, xi, xi * e1, lw);
          }
        }
      }
    }
  }
  return rule;
}

template <typename T, typename Build>
const T& cached(std::map<int, std::unique_ptr<T>>& cache, int key, Build build) {
  std::lock_guard<std::recursive_mutex> lock(cache_mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<T>(build());
  return *slot;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw_invalid("Gauss-Legendre order must be in [1, 64]");
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  return cached(cache, n, [n] { return build_gauss(n); });
}

const TriangleRule& collapsed_gauss(int n) {
  static std::map<int, std::unique_ptr<TriangleRule>> cache;
  return cached(cache, n, [n] { return build_collapsed(n); });
}

const TriangleRule& seven_point_rule() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double s = std::sqrt(15.0);
    const double a = (6.0 - s) / 21.0, b = (6.0 + s) / 21.0;
    const double wa = (155.0 - s) / 2400.0, wb = (155.0 + s) / 2400.0;
    r.uv = {{1.0 / 3.0, 1.0 / 3.0}, {a, a}, {1 - 2 * a, a}, {a, 1 - 2 * a},
            {b, b}, {1 - 2 * b, b}, {b, 1 - 2 * b}};
    r.w = {9.0 / 80.0, wa, wa, wa, wb, wb, wb};
    return r;
  }();
  return rule;
}

const PairRule& sauter_schwab(int common, int order) {
  if (common < 1 || common > 3) throw_invalid("sauter_schwab: common vertex count must be 1..3");
  if (order < 1 || order > 20) throw_invalid("sauter_schwab: order must be in [1, 20]");
  static std::map<int, std::unique_ptr<PairRule>> cache;
  return cached(cache, 100 * common + order, [=] { return build_sauter_schwab(common, order); });
}

}  // namespace cfie
