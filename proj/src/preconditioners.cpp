#include "cfie/preconditioners.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "cfie/errors.hpp"
#include "cfie/parallel.hpp"

namespace cfie {

ProjectorContext make_projector_context(const Topology& topo, double inner_tol) {
  if (!(inner_tol > 0.0 && inner_tol < 1.0)) throw_invalid("projector: inner tolerance must lie in (0, 1)");
  ProjectorContext ctx;
  ctx.loops = loop_matrix(topo, false);
  ctx.laplacian = graph_laplacian(ctx.loops);
  ctx.inner_tol = inner_tol;
  const int nv = topo.num_vertices();
  ctx.max_inner = 10 * nv + 100;
  for (int c = 0; c < topo.num_components; ++c) {
    CVector z = CVector::Zero(nv);
    for (int v = 0; v < nv; ++v) {
      if (topo.vertex_component[v] == c) z(v) = 1.0;
    }
    z /= z.norm();
    ctx.deflation.push_back(z);
  }
  return ctx;
}

CVector solenoidal_projector_apply(const ProjectorContext& ctx, const CVector& x) {
  const SparseMatrix& lam = ctx.loops.matrix;
  if (x.size() != lam.rows()) throw_invalid("projector: vector length does not match the RWG count");
  const Eigen::SparseMatrix<cdouble> lc = lam.cast<cdouble>();
  const CVector rhs = lc.transpose() * x;
  const Eigen::SparseMatrix<cdouble> l = ctx.laplacian.cast<cdouble>();
  CgOptions opts;
  opts.tol = ctx.inner_tol;
  opts.max_iter = ctx.max_inner > 0 ? ctx.max_inner : 10 * static_cast<int>(lam.cols()) + 100;
  const SolveReport rep = cg([&](const CVector& v) -> CVector { return l * v; }, rhs, opts, ctx.deflation);
  if (!rep.converged) {
    std::ostringstream msg;
    msg << "projector: inner CG stopped after " << rep.iterations << " iterations at relative residual "
        << rep.achieved();
    throw ConvergenceError(msg.str(), rep.achieved());
  }
  return lc * rep.x;
}

Eigen::MatrixXcd solenoidal_projector_apply(const ProjectorContext& ctx, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd out(x.rows(), x.cols());
  parallel_for(static_cast<int>(x.cols()),
               [&](int, int j) { out.col(j) = solenoidal_projector_apply(ctx, CVector(x.col(j))); });
  return out;
}

DiagonalScaling jacobi_rescale(const SparseTransform& s, const Eigen::MatrixXcd& z) {
  if (z.rows() != z.cols() || z.rows() != s.rows()) throw_invalid("jacobi_rescale: dimension mismatch");
  DiagonalScaling d;
  d.kind = ScalingKind::jacobi;
  d.values.resize(s.cols());
  for (int c = 0; c < s.cols(); ++c) {
    cdouble acc = 0.0;
    for (SparseMatrix::InnerIterator a(s.matrix, c); a; ++a) {
      for (SparseMatrix::InnerIterator b(s.matrix, c); b; ++b) acc += a.value() * b.value() * z(a.row(), b.row());
    }
    const double m = std::abs(acc);
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw SingularBasis("jacobi_rescale: zero congruence diagonal at column " + std::to_string(c), c);
    }
    d.values(c) = 1.0 / std::sqrt(m);
  }
  return d;
}

DiagonalScaling jacobi_rescale(const SparseTransform& s, const SystemMatrix& z) {
  return jacobi_rescale(s, z.values);
}

NormEstimate estimate_spectral_norm(const LinearOperator& apply, const LinearOperator& adjoint, int n, double tol,
                                    std::uint64_t seed, int max_iter) {
  if (n < 1) throw_invalid("estimate_spectral_norm: dimension must be positive");
  if (!(tol > 0.0)) throw_invalid("estimate_spectral_norm: tolerance must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  CVector x(n);
  for (int i = 0; i < n; ++i) x(i) = cdouble(dist(rng), dist(rng));
  x.normalize();
  NormEstimate est;
  for (int it = 0; it < max_iter; ++it) {
    const CVector y = apply(x);
    const double sigma = y.norm();  // ||A x|| with ||x|| = 1, a lower bound
    ++est.iterations;
    est.value = std::max(est.value, sigma);
    if (sigma == 0.0) {
      est.converged = true;
      break;
    }
    CVector z = adjoint(y);
    const double zn = z.norm();
    if (zn == 0.0) {
      est.converged = true;
      break;
    }
    // Eigen-residual of A^H A at the Rayleigh quotient sigma^2. A small
    // change between sweeps is not enough when the top gap is narrow.
    const double lambda = sigma * sigma;
    const bool done = (z - lambda * x).norm() <= tol * lambda;
    x = z / zn;
    if (done) {
      est.converged = true;
      break;
    }
  }
  return est;
}

CVector LeftPreconditioner::star_part(const CVector& x) const {
  const Eigen::SparseMatrix<cdouble> sc = s.cast<cdouble>();
  CVector y = sc.transpose() * x;
  y = y.cwiseProduct(dphi.cwiseAbs2().cast<cdouble>());
  return sc * y;
}

CVector LeftPreconditioner::apply(const CVector& x) const {
  CVector out = solenoidal_projector_apply(projector, x) / alpha_norm;
  if (star_term) out += star_part(x) / beta_norm;
  return out;
}

Eigen::MatrixXcd LeftPreconditioner::apply(const Eigen::MatrixXcd& x) const {
  Eigen::MatrixXcd out(x.rows(), x.cols());
  parallel_for(static_cast<int>(x.cols()), [&](int, int j) { out.col(j) = apply(CVector(x.col(j))); });
  return out;
}

LeftPreconditioner build_left_preconditioner(const ProjectorContext& projector, const SparseTransform& s,
                                             const DiagonalScaling& dphi, const Eigen::MatrixXcd& z,
                                             const NormOptions& opts) {
  const int n = static_cast<int>(z.rows());
  if (z.cols() != n || projector.loops.rows() != n || s.rows() != n) {
    throw_invalid("build_left_preconditioner: operands live on different RWG spaces");
  }
  if (dphi.values.size() != s.cols()) throw_invalid("build_left_preconditioner: D_Phi length mismatch");
  LeftPreconditioner m;
  m.projector = projector;
  m.s = s.matrix;
  m.dphi = dphi.values;
  const Eigen::MatrixXcd zh = z.adjoint();
  auto p = [&](const CVector& x) { return solenoidal_projector_apply(m.projector, x); };
  m.alpha_estimate = estimate_spectral_norm([&](const CVector& x) { return p(z * x); },
                                            [&](const CVector& y) { return CVector(zh * p(y)); }, n, opts.tol,
                                            opts.seed);
  m.beta_estimate = estimate_spectral_norm([&](const CVector& x) { return m.star_part(z * x); },
                                           [&](const CVector& y) { return CVector(zh * m.star_part(y)); }, n,
                                           opts.tol, opts.seed + 1);
  if (!(m.alpha_estimate.value > 0.0) || !(m.beta_estimate.value > 0.0)) {
    throw std::runtime_error("build_left_preconditioner: a norm estimate vanished");
  }
  m.alpha_norm = m.alpha_estimate.value;
  m.beta_norm = m.beta_estimate.value;
  return m;
}

SplitSystem split_preconditioned_system(const SparseMatrix& h, const Eigen::MatrixXcd& z, const CVector& v) {
  if (h.rows() != z.rows() || z.rows() != z.cols() || v.size() != z.rows()) {
    throw_invalid("split_preconditioned_system: dimension mismatch");
  }
  const Eigen::SparseMatrix<cdouble> hc = h.cast<cdouble>();
  const Eigen::SparseMatrix<cdouble> ht = hc.transpose();
  const Eigen::MatrixXcd zh = z * hc;
  SplitSystem out;
  out.matrix = ht * zh;
  out.rhs = ht * v;
  return out;
}

}  // namespace cfie
