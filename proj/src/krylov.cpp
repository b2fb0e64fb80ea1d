#include "cfie/krylov.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cfie/errors.hpp"

namespace cfie {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void givens(std::complex<double> a, std::complex<double> b, double& c, std::complex<double>& s) {
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
  } else {
    const double r = std::hypot(na, nb);
    c = na / r;
    s = (a / na) * std::conj(b) / r;
  }
}

void project_out(CVector& v, const std::vector<CVector>& basis) {
  for (const CVector& z : basis) v -= z * z.dot(v);
}

}  // namespace

SolveReport gmres(const LinearOperator& apply_a, const CVector& b, const GmresOptions& opts,
                  const LinearOperator& left_precond) {
  if (!(opts.tol > 0.0)) throw_invalid("gmres: tolerance must be positive");
  if (opts.max_iter < 1) throw_invalid("gmres: max_iter must be at least 1");
  const auto start = Clock::now();
  const int n = static_cast<int>(b.size());
  auto op = [&](const CVector& v) -> CVector {
    CVector w = apply_a(v);
    if (w.size() != n) throw_invalid("gmres: operator changed the vector length");
    return left_precond ? left_precond(w) : w;
  };

  SolveReport rep;
  rep.x = CVector::Zero(n);
  const CVector mb = left_precond ? left_precond(b) : b;
  const double bnorm = mb.norm();
  if (bnorm == 0.0) throw_invalid("gmres: right-hand side is zero");
  rep.residuals.push_back(1.0);

  const int cycle = opts.restart > 0 ? opts.restart : opts.max_iter;
  CVector r = mb;
  while (rep.iterations < opts.max_iter) {
    const int m = std::min(cycle, opts.max_iter - rep.iterations);
    const double beta = r.norm();
    std::vector<CVector> v;
    v.reserve(m + 1);
    v.push_back(r / beta);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<double> cs(m);
    std::vector<std::complex<double>> sn(m);
    CVector g = CVector::Zero(m + 1);
    g(0) = beta;
    int j = 0;
    bool done = false;
    for (; j < m; ++j) {
      CVector w = op(v[j]);
      for (int i = 0; i <= j; ++i) {
        h(i, j) = v[i].dot(w);
        w -= h(i, j) * v[i];
      }
      const double hn = w.norm();
      h(j + 1, j) = hn;
      for (int i = 0; i < j; ++i) {
        const std::complex<double> t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -std::conj(sn[i]) * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      givens(h(j, j), h(j + 1, j), cs[j], sn[j]);
      h(j, j) = cs[j] * h(j, j) + sn[j] * h(j + 1, j);
      h(j + 1, j) = 0.0;
      g(j + 1) = -std::conj(sn[j]) * g(j);
      g(j) = cs[j] * g(j);
      ++rep.iterations;
      const double rel = std::abs(g(j + 1)) / bnorm;
      rep.residuals.push_back(rel);
      if (rel <= opts.tol || hn <= 1e-14 * beta) {
        done = true;
        ++j;
        break;
      }
      v.push_back(w / hn);
    }
    // Back substitution on the triangular part.
    CVector y = g.head(j);
    for (int i = j - 1; i >= 0; --i) {
      for (int l = i + 1; l < j; ++l) y(i) -= h(i, l) * y(l);
      y(i) /= h(i, i);
    }
    for (int i = 0; i < j; ++i) rep.x += y(i) * v[i];
    if (done) {
      rep.converged = rep.residuals.back() <= opts.tol;
      if (rep.converged) break;
    }
    r = mb - op(rep.x);
    if (r.norm() / bnorm <= opts.tol) {
      rep.converged = true;
      break;
    }
    if (done) break;  // breakdown without convergence
  }
  rep.wall_seconds = seconds_since(start);
  return rep;
}

SolveReport cg(const LinearOperator& apply_spd, const CVector& b, const CgOptions& opts,
               const std::vector<CVector>& deflation) {
  if (!(opts.tol > 0.0)) throw_invalid("cg: tolerance must be positive");
  const auto start = Clock::now();
  const int n = static_cast<int>(b.size());
  SolveReport rep;
  rep.x = CVector::Zero(n);
  CVector r = b;
  project_out(r, deflation);
  const double bnorm = r.norm();
  rep.residuals.push_back(bnorm == 0.0 ? 0.0 : 1.0);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.wall_seconds = seconds_since(start);
    return rep;
  }
  CVector p = r;
  double rr = r.squaredNorm();
  for (int it = 0; it < opts.max_iter; ++it) {
    CVector ap = apply_spd(p);
    project_out(ap, deflation);
    const double curv = p.dot(ap).real();
    if (curv < 0.0) throw std::domain_error("cg: negative curvature, operator is not positive semidefinite");
    if (curv == 0.0) break;
    const double alpha = rr / curv;
    rep.x += alpha * p;
    r -= alpha * ap;
    project_out(r, deflation);
    const double rr_new = r.squaredNorm();
    ++rep.iterations;
    rep.residuals.push_back(std::sqrt(rr_new) / bnorm);
    if (rep.residuals.back() <= opts.tol) {
      rep.converged = true;
      break;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  project_out(rep.x, deflation);
  rep.wall_seconds = seconds_since(start);
  return rep;
}

}  // namespace cfie
