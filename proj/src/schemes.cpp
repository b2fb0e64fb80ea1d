#include "cfie/schemes.hpp"

#include <cmath>

#include <Eigen/LU>

#include "cfie/errors.hpp"

namespace cfie {
namespace {

Eigen::VectorXd dyadic_or_ones(const SparseTransform& t, double s) {
  if (!t.has_levels()) return Eigen::VectorXd::Ones(t.cols());
  return level_scaling(t, s).values;
}

SparseTransform non_solenoidal(const Problem& p, int branching) {
  if (p.hierarchy) return hierarchical_star(*p.hierarchy);
  return agglomerated_hierarchical_star(p.basis.topology, branching);
}

SparseTransform scale_columns(const SparseTransform& t, const Eigen::VectorXd& d) {
  SparseTransform out = t;
  out.matrix = t.matrix * d.asDiagonal();
  return out;
}

}  // namespace

const char* to_string(SchemeId id) {
  switch (id) {
    case SchemeId::none: return "none";
    case SchemeId::loopstar: return "loopstar";
    case SchemeId::loop: return "loop";
    case SchemeId::hloop: return "hloop";
    case SchemeId::projector: return "projector";
  }
  return "?";
}

std::string SchemeDescriptor::name() const {
  return std::string(equation == Equation::efie ? "efie-" : "cfie-") + to_string(id);
}

SchemeDescriptor parse_scheme(const std::string& text) {
  SchemeDescriptor d;
  std::string rest = text;
  if (rest.rfind("efie-", 0) == 0) {
    d.equation = Equation::efie;
    rest = rest.substr(5);
  } else if (rest.rfind("cfie-", 0) == 0) {
    rest = rest.substr(5);
  }
  for (SchemeId id : {SchemeId::none, SchemeId::loopstar, SchemeId::loop, SchemeId::hloop, SchemeId::projector}) {
    if (rest == to_string(id)) {
      d.id = id;
      return d;
    }
  }
  throw_invalid("unknown scheme '" + text + "' (expected none, loopstar, loop, hloop or projector)");
}

Problem make_problem(std::shared_ptr<const RefinementHierarchy> hierarchy, const std::string& geometry, double f_hz,
                     double alpha, const QuadratureOptions& quad) {
  if (!hierarchy) throw_invalid("make_problem: null hierarchy");
  if (!(f_hz > 0.0)) throw_invalid("make_problem: frequency must be positive");
  Problem p;
  p.geometry = geometry;
  p.hierarchy = std::move(hierarchy);
  p.basis = rwg_space(p.hierarchy->fine(), p.hierarchy->fine_topology());
  p.f_hz = f_hz;
  p.k = wavenumber(f_hz);
  p.alpha = alpha;
  p.ops = assemble_operators(p.basis, p.k, true, quad);
  p.ze = efie_matrix(p.basis, p.ops);
  p.zm = mfie_matrix(p.ops);
  // Currents are normalized as eta J, so the MFIE enters with eta = 1.
  p.zc = combine_cfie(p.ze, p.zm, alpha, 1.0);
  PlaneWave wave;
  wave.k = p.k;
  const RhsParts parts = plane_wave_parts(p.basis, wave);
  p.ve = parts.ve;
  p.vc = alpha * parts.ve + (1.0 - alpha) * parts.eta_vm;
  return p;
}

Problem make_problem(const SurfaceMesh& mesh, const std::string& geometry, double f_hz, double alpha,
                     const QuadratureOptions& quad) {
  Problem p = make_problem(std::make_shared<const RefinementHierarchy>(dyadic_refine(mesh, 0)), geometry, f_hz,
                           alpha, quad);
  p.hierarchy.reset();
  return p;
}

CVector PreparedSystem::to_rwg(const CVector& y) const {
  if (recover.size() == 0 && recover.rows() == 0) return y;
  return recover.cast<cdouble>() * y;
}

Eigen::MatrixXcd PreparedSystem::preconditioned_dense() const {
  if (left) return left->apply(matrix);
  return matrix;
}

PreparedSystem prepare_system(const Problem& p, const SchemeDescriptor& scheme, const SchemeOptions& opts) {
  PreparedSystem out;
  out.scheme = scheme;
  const Equation eq = scheme.equation;
  const Topology& topo = p.basis.topology;

  if (scheme.id == SchemeId::none) {
    out.matrix = p.system(eq).values;
    out.rhs = p.rhs(eq);
    return out;
  }

  if (scheme.id == SchemeId::projector) {
    const SparseTransform s = non_solenoidal(p, opts.branching);
    DiagonalScaling dphi;
    if (opts.dphi == DPhiMode::jacobi) {
      dphi = jacobi_rescale(s, p.ze);
      if (opts.compose_dyadic) dphi.values = dphi.values.cwiseProduct(dyadic_or_ones(s, 0.0));
    } else {
      dphi.values = dyadic_or_ones(s, 0.0);
    }
    const ProjectorContext ctx = make_projector_context(topo, opts.inner_tol);
    out.matrix = p.system(eq).values;
    out.rhs = p.rhs(eq);
    out.left = build_left_preconditioner(ctx, s, dphi, out.matrix, NormOptions{opts.power_tol, opts.seed});
    return out;
  }

  SparseTransform loops, stars;
  switch (scheme.id) {
    case SchemeId::loopstar:
      loops = loop_matrix(topo, true);
      stars = star_matrix(topo, true);
      break;
    case SchemeId::loop:
      loops = loop_matrix(topo, true);
      stars = non_solenoidal(p, opts.branching);
      break;
    case SchemeId::hloop:
      if (!p.hierarchy) throw UnsupportedGeometry("h-loop functions need a structured refinement hierarchy");
      loops = hierarchical_nodal_loops(*p.hierarchy);
      stars = hierarchical_star(*p.hierarchy);
      break;
    default:
      throw_invalid("prepare_system: unhandled scheme");
  }

  Eigen::VectorXd dl = dyadic_or_ones(loops, opts.loop_exponent);
  Eigen::VectorXd ds = dyadic_or_ones(stars, 0.0);
  const double sk = std::sqrt(p.k);
  if (opts.dphi == DPhiMode::dyadic) {
    // Frequency factors of T; the CFIE keeps its loop block unscaled in k.
    if (eq == Equation::efie) dl /= sk;
    ds *= sk;
  }
  const SparseTransform h =
      concatenate(loops, Eigen::VectorXd::Ones(loops.cols()), 1.0, stars, Eigen::VectorXd::Ones(stars.cols()), 1.0);
  const SparseMatrix& hm = h.matrix;
  Eigen::MatrixXcd b = transformed_efie(p.basis, p.ops, hm, hm);
  if (eq == Equation::cfie) {
    const Eigen::SparseMatrix<cdouble> hc = hm.cast<cdouble>();
    const Eigen::MatrixXcd zmh = p.zm.values * hc;
    const Eigen::MatrixXcd hzm = Eigen::SparseMatrix<cdouble>(hc.transpose()) * zmh;
    b = p.alpha * b + (1.0 - p.alpha) * hzm;
  }
  Eigen::VectorXd d(h.cols());
  d << dl, ds;
  if (opts.dphi == DPhiMode::jacobi) {
    Eigen::VectorXd jac(h.cols());
    for (int i = 0; i < h.cols(); ++i) {
      const double m = std::abs(b(i, i));
      if (!(m > 0.0)) throw SingularBasis("split scheme: zero diagonal at column " + std::to_string(i), i);
      jac(i) = 1.0 / std::sqrt(m);
    }
    d = opts.compose_dyadic ? Eigen::VectorXd(jac.cwiseProduct(d)) : jac;
  }
  out.matrix = d.asDiagonal() * b * d.asDiagonal();
  const SparseTransform scaled = scale_columns(h, d);
  out.recover = scaled.matrix;
  out.rhs = out.recover.cast<cdouble>().transpose() * p.rhs(eq);
  return out;
}

SolveOutcome solve_prepared(const Problem& p, const PreparedSystem& sys, const GmresOptions& opts) {
  SolveOutcome out;
  LinearOperator precond;
  if (sys.left) precond = [&](const CVector& x) { return sys.left->apply(x); };
  out.report = gmres([&](const CVector& y) -> CVector { return sys.matrix * y; }, sys.rhs, opts, precond);
  out.current = sys.to_rwg(out.report.x);
  const Eigen::MatrixXcd& z = p.system(sys.scheme.equation).values;
  const CVector& v = p.rhs(sys.scheme.equation);
  out.true_residual = (v - z * out.current).norm() / v.norm();
  return out;
}

CVector direct_solve(const Problem& p, Equation eq) {
  return p.system(eq).values.partialPivLu().solve(p.rhs(eq));
}

}  // namespace cfie
