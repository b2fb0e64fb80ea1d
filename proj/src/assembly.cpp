#include "cfie/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "cfie/errors.hpp"
#include "cfie/parallel.hpp"
#include "cfie/quadrature.hpp"

namespace cfie {
namespace {

constexpr double kInv4Pi = 0.25 / M_PI;

struct TriangleGeom {
  Vec3 c;
  std::array<Vec3, 3> q;  // vertices relative to c
  Vec3 n;
  double area;
  double radius;
};

TriangleGeom geometry(const SurfaceMesh& mesh, int t) {
  TriangleGeom g;
  g.c = mesh.centroid(t);
  g.radius = 0.0;
  for (int i = 0; i < 3; ++i) {
    g.q[i] = mesh.vertex(t, i) - g.c;
    g.radius = std::max(g.radius, g.q[i].norm());
  }
  g.n = mesh.normal(t);
  g.area = mesh.area(t);
  return g;
}

// Running sums over point pairs; x, y are points relative to the centroids.
struct Sums {
  cdouble s1 = 0, sxy = 0;
  Eigen::Vector3cd sx = Eigen::Vector3cd::Zero(), sy = Eigen::Vector3cd::Zero();
  // Double-layer sums, test on t.
  cdouble t1 = 0, t2 = 0, u1 = 0, uxy = 0;
  Eigen::Vector3cd t3 = Eigen::Vector3cd::Zero(), t4 = Eigen::Vector3cd::Zero();
  Eigen::Vector3cd ux = Eigen::Vector3cd::Zero(), uy = Eigen::Vector3cd::Zero();
  // Test on u.
  cdouble p1 = 0, p2 = 0, m1 = 0, mxy = 0;
  Eigen::Vector3cd p3 = Eigen::Vector3cd::Zero();
  Eigen::Vector3cd mx = Eigen::Vector3cd::Zero(), my = Eigen::Vector3cd::Zero();
};

template <bool WithK>
inline void accumulate(Sums& s, const Vec3& delta, const Vec3& x, const Vec3& y, double w, double k,
                       const Vec3& nt, const Vec3& nu) {
  const Vec3 d = delta + x - y;
  const double r = d.norm();
  const double kr = k * r;
  const double c = std::cos(kr), sn = std::sin(kr);
  const double inv = kInv4Pi / r;
  const cdouble wg(w * c * inv, w * sn * inv);
  s.s1 += wg;
  s.sxy += wg * x.dot(y);
  s.sx += wg * x;
  s.sy += wg * y;
  if constexpr (WithK) {
    // grad_r G = h d, h = (ikR - 1) e^{ikR} / (4 pi R^3)
    const cdouble e(c, sn);
    const cdouble wh = w * cdouble(-1.0, kr) * e * (inv / (r * r));
    const double xd = x.dot(d), yd = y.dot(d), xy = x.dot(y);
    const double nty = nt.dot(y), ntd = nt.dot(d);
    const double nux = nu.dot(x), nud = nu.dot(d);
    s.t1 += wh * (xd * nty);
    s.t2 += wh * xd;
    s.t3 += (wh * nty) * d;
    s.t4 += wh * d;
    const cdouble whn = wh * ntd;
    s.u1 += whn;
    s.uxy += whn * xy;
    s.ux += whn * x;
    s.uy += whn * y;
    s.p1 += wh * (yd * nux);
    s.p2 += wh * yd;
    s.p3 += (wh * nux) * d;
    const cdouble whm = wh * nud;
    s.m1 += whm;
    s.mxy += whm * xy;
    s.mx += whm * x;
    s.my += whm * y;
  }
}

inline cdouble dotc(const Eigen::Vector3cd& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Expands (x - q_i).(y - q_j) style products into the running sums.
PairIntegrals finish(const Sums& s, const TriangleGeom& gt, const TriangleGeom& gu, bool with_k, bool zero_k) {
  PairIntegrals out;
  out.v = 4.0 * gt.area * gu.area * s.s1;
  for (int i = 0; i < 3; ++i) {
    const Vec3& qi = gt.q[i];
    for (int j = 0; j < 3; ++j) {
      const Vec3& qj = gu.q[j];
      out.a(i, j) = s.sxy - dotc(s.sx, qj) - dotc(s.sy, qi) + qi.dot(qj) * s.s1;
    }
  }
  out.kt.setZero();
  out.ku.setZero();
  if (with_k && !zero_k) {
    for (int i = 0; i < 3; ++i) {
      const Vec3& qi = gt.q[i];
      const double nuqi = gu.n.dot(qi);
      for (int j = 0; j < 3; ++j) {
        const Vec3& qj = gu.q[j];
        const double ntqj = gt.n.dot(qj);
        const cdouble tv = s.t1 - s.t2 * ntqj - dotc(s.t3, qi) + dotc(s.t4, qi) * ntqj;
        const cdouble uv = s.uxy - dotc(s.ux, qj) - dotc(s.uy, qi) + qi.dot(qj) * s.u1;
        out.kt(i, j) = -(tv - uv);
        const cdouble pv = s.p1 - s.p2 * nuqi - dotc(s.p3, qj) + dotc(s.t4, qj) * nuqi;
        const cdouble mv = s.mxy - dotc(s.mx, qj) - dotc(s.my, qi) + qi.dot(qj) * s.m1;
        out.ku(j, i) = pv - mv;
      }
    }
  }
  return out;
}

bool coplanar(const TriangleGeom& gt, const TriangleGeom& gu) {
  const double tol = 1e-12 * std::max(gt.radius, gu.radius);
  if (std::abs(gt.n.dot(gu.n)) < 1.0 - 1e-12) return false;
  for (const auto& q : gu.q) {
    if (std::abs(gt.n.dot(gu.c + q - gt.c)) > tol) return false;
  }
  return true;
}

template <bool WithK>
PairIntegrals integrate_pair(const SurfaceMesh& mesh, const TriangleGeom& gt, const TriangleGeom& gu, int t,
                             int u, double k, const QuadratureOptions& opts) {
  const auto& vt = mesh.triangles[t];
  const auto& vu = mesh.triangles[u];
  std::array<int, 3> pt{}, pu{};
  int common = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (vt[i] == vu[j]) {
        pt[common] = i;
        pu[common] = j;
        ++common;
      }
    }
  }
  auto complete = [&](std::array<int, 3>& perm) {
    int n = common;
    for (int i = 0; i < 3 && n < 3; ++i) {
      if (std::find(perm.begin(), perm.begin() + n, i) == perm.begin() + n) perm[n++] = i;
    }
  };
  complete(pt);
  complete(pu);

  const Vec3 delta = gt.c - gu.c;
  Sums s;
  if (common > 0) {
    const PairRule& rule = sauter_schwab(common, opts.singular_order);
    const Vec3 et1 = gt.q[pt[1]] - gt.q[pt[0]], et2 = gt.q[pt[2]] - gt.q[pt[0]];
    const Vec3 eu1 = gu.q[pu[1]] - gu.q[pu[0]], eu2 = gu.q[pu[2]] - gu.q[pu[0]];
    for (int p = 0; p < rule.size(); ++p) {
      const auto& pp = rule.points[p];
      const Vec3 x = gt.q[pt[0]] + pp[0] * et1 + pp[1] * et2;
      const Vec3 y = gu.q[pu[0]] + pp[2] * eu1 + pp[3] * eu2;
      accumulate<WithK>(s, delta, x, y, rule.w[p], k, gt.n, gu.n);
    }
  } else {
    const double sep = delta.norm() / (gt.radius + gu.radius);
    const TriangleRule& rule = collapsed_gauss(regular_pair_order(sep, opts.far_boost));
    const int n = rule.size();
    std::vector<Vec3> xs(n), ys(n);
    const Vec3 et1 = gt.q[1] - gt.q[0], et2 = gt.q[2] - gt.q[0];
    const Vec3 eu1 = gu.q[1] - gu.q[0], eu2 = gu.q[2] - gu.q[0];
    for (int a = 0; a < n; ++a) {
      xs[a] = gt.q[0] + rule.uv[a][0] * et1 + rule.uv[a][1] * et2;
      ys[a] = gu.q[0] + rule.uv[a][0] * eu1 + rule.uv[a][1] * eu2;
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) accumulate<WithK>(s, delta, xs[a], ys[b], rule.w[a] * rule.w[b], k, gt.n, gu.n);
    }
  }
  const bool zero_k = common == 3 || (common > 0 && coplanar(gt, gu));
  PairIntegrals out = finish(s, gt, gu, WithK, zero_k);
  if (t == u) {
    const Eigen::Matrix3cd sym = 0.5 * (out.a + out.a.transpose());
    out.a = sym;
  }
  return out;
}

struct Slot {
  int triangle;
  int local;
  double sign;
};

std::array<Slot, 2> slots(const RwgBasis& basis, int i) {
  const auto& f = basis.functions[i];
  auto local = [&](int t) {
    const auto& te = basis.topology.triangle_edges[t];
    return static_cast<int>(std::find(te.begin(), te.end(), f.edge) - te.begin());
  };
  return {Slot{f.plus, local(f.plus), 1.0}, Slot{f.minus, local(f.minus), -1.0}};
}

void check_k(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw_invalid("wavenumber must be positive and finite");
}

}  // namespace

double wavenumber(double f_hz) { return 2.0 * M_PI * f_hz / kSpeedOfLight; }

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::za: return "Z_A";
    case Formulation::zphi: return "Z_Phi";
    case Formulation::ze: return "Z_E";
    case Formulation::zm: return "Z_M";
    case Formulation::zc: return "Z_C";
    case Formulation::gram: return "G_ff";
    case Formulation::transformed: return "transformed";
  }
  return "?";
}

int regular_pair_order(double separation, int boost) {
  int n;
  if (separation < 2.0) n = 8;
  else if (separation < 4.0) n = 6;
  else if (separation < 8.0) n = 5;
  else if (separation < 20.0) n = 4;
  else n = 3;
  return std::clamp(n + boost, 1, 40);
}

PairIntegrals pair_integrals(const SurfaceMesh& mesh, int t, int u, double k, bool with_k,
                             const QuadratureOptions& opts) {
  check_k(k);
  const TriangleGeom gt = geometry(mesh, t), gu = geometry(mesh, u);
  return with_k ? integrate_pair<true>(mesh, gt, gu, t, u, k, opts)
                : integrate_pair<false>(mesh, gt, gu, t, u, k, opts);
}

OperatorSet assemble_operators(const RwgBasis& basis, double k, bool with_mfie, const QuadratureOptions& opts) {
  check_k(k);
  const SurfaceMesh& mesh = basis.mesh;
  const int nf = mesh.num_triangles();
  const int n = basis.size();
  std::vector<TriangleGeom> geom(nf);
  for (int t = 0; t < nf; ++t) geom[t] = geometry(mesh, t);

  // Triangle-level blocks; every entry is written by exactly one worker.
  Eigen::MatrixXcd tri_a(3 * nf, 3 * nf);
  Eigen::MatrixXcd tri_k;
  if (with_mfie) tri_k.resize(3 * nf, 3 * nf);
  OperatorSet ops;
  ops.k = k;
  ops.fingerprint = mesh.fingerprint();
  ops.vtt.resize(nf, nf);

  parallel_for(nf, [&](int, int t) {
    for (int u = t; u < nf; ++u) {
      const PairIntegrals p = with_mfie ? integrate_pair<true>(mesh, geom[t], geom[u], t, u, k, opts)
                                        : integrate_pair<false>(mesh, geom[t], geom[u], t, u, k, opts);
      ops.vtt(t, u) = p.v;
      ops.vtt(u, t) = p.v;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          tri_a(3 * t + i, 3 * u + j) = p.a(i, j);
          tri_a(3 * u + j, 3 * t + i) = p.a(i, j);
          if (with_mfie) {
            tri_k(3 * t + i, 3 * u + j) = p.kt(i, j);
            if (u != t) tri_k(3 * u + j, 3 * t + i) = p.ku(j, i);
          }
        }
      }
    }
  });

  std::vector<std::array<Slot, 2>> slot(n);
  for (int i = 0; i < n; ++i) slot[i] = slots(basis, i);
  const cdouble minus_ik(0.0, -k);
  ops.za.resize(n, n);
  if (with_mfie) ops.kmat.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cdouble a = 0.0, kk = 0.0;
      for (const Slot& si : slot[i]) {
        for (const Slot& sj : slot[j]) {
          const int r = 3 * si.triangle + si.local, c = 3 * sj.triangle + sj.local;
          const double s = si.sign * sj.sign;
          a += s * tri_a(r, c);
          if (with_mfie) kk += s * tri_k(r, c);
        }
      }
      ops.za(i, j) = minus_ik * a;
      if (with_mfie) ops.kmat(i, j) = kk;
    }
  }
  ops.gram = assemble_gram(basis).values.real();
  return ops;
}

SystemMatrix assemble_gram(const RwgBasis& basis) {
  const SurfaceMesh& mesh = basis.mesh;
  const int nf = mesh.num_triangles();
  const TriangleRule& rule = seven_point_rule();
  // Local 3x3 blocks of int (r - p_i).(r - p_j) / (4 A^2).
  std::vector<Eigen::Matrix3d> local(nf);
  for (int t = 0; t < nf; ++t) {
    const TriangleGeom g = geometry(mesh, t);
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int p = 0; p < rule.size(); ++p) {
      const Vec3 x = g.q[0] + rule.uv[p][0] * (g.q[1] - g.q[0]) + rule.uv[p][1] * (g.q[2] - g.q[0]);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m(i, j) += rule.w[p] * (x - g.q[i]).dot(x - g.q[j]);
      }
    }
    local[t] = m * (2.0 * g.area) / (4.0 * g.area * g.area);
  }
  const int n = basis.size();
  SystemMatrix out;
  out.formulation = Formulation::gram;
  out.fingerprint = mesh.fingerprint();
  out.values = Eigen::MatrixXcd::Zero(n, n);
  std::vector<std::array<Slot, 2>> slot(n);
  for (int i = 0; i < n; ++i) slot[i] = slots(basis, i);
  std::vector<std::vector<std::pair<int, Slot>>> per_triangle(nf);
  for (int i = 0; i < n; ++i) {
    for (const Slot& s : slot[i]) per_triangle[s.triangle].push_back({i, s});
  }
  for (int t = 0; t < nf; ++t) {
    for (const auto& [i, si] : per_triangle[t]) {
      for (const auto& [j, sj] : per_triangle[t]) {
        out.values(i, j) += si.sign * sj.sign * local[t](si.local, sj.local);
      }
    }
  }
  return out;
}

SystemMatrix scalar_potential(const RwgBasis& basis, const OperatorSet& ops) {
  const int n = basis.size();
  std::vector<std::array<Slot, 2>> slot(n);
  for (int i = 0; i < n; ++i) slot[i] = slots(basis, i);
  const cdouble factor = -1.0 / cdouble(0.0, ops.k);
  SystemMatrix out;
  out.formulation = Formulation::zphi;
  out.k = ops.k;
  out.fingerprint = ops.fingerprint;
  out.values.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cdouble v = 0.0;
      for (const Slot& si : slot[i]) {
        for (const Slot& sj : slot[j]) {
          v += (si.sign / basis.mesh.area(si.triangle)) * (sj.sign / basis.mesh.area(sj.triangle)) *
               ops.vtt(si.triangle, sj.triangle);
        }
      }
      out.values(i, j) = factor * v;
    }
  }
  return out;
}

SystemMatrix efie_matrix(const RwgBasis& basis, const OperatorSet& ops) {
  SystemMatrix out = scalar_potential(basis, ops);
  out.values += ops.za;
  out.formulation = Formulation::ze;
  return out;
}

SystemMatrix mfie_matrix(const OperatorSet& ops) {
  if (ops.kmat.size() == 0) throw_invalid("operator set was assembled without the MFIE");
  SystemMatrix out;
  out.formulation = Formulation::zm;
  out.k = ops.k;
  out.fingerprint = ops.fingerprint;
  out.values = ops.kmat;
  out.values += 0.5 * ops.gram.cast<cdouble>();
  return out;
}

EfieMatrices assemble_efie(const RwgBasis& basis, double k, const QuadratureOptions& opts) {
  const OperatorSet ops = assemble_operators(basis, k, false, opts);
  EfieMatrices out;
  out.za.values = ops.za;
  out.za.formulation = Formulation::za;
  out.za.k = k;
  out.za.fingerprint = ops.fingerprint;
  out.zphi = scalar_potential(basis, ops);
  return out;
}

SystemMatrix assemble_mfie(const RwgBasis& basis, double k, const QuadratureOptions& opts) {
  return mfie_matrix(assemble_operators(basis, k, true, opts));
}

SystemMatrix combine_cfie(const SystemMatrix& ze, const SystemMatrix& zm, double alpha, double eta,
                          bool allow_endpoints) {
  if (ze.size() != zm.size()) throw_invalid("combine_cfie: dimension mismatch");
  if (ze.k != zm.k) throw_invalid("combine_cfie: wavenumbers differ");
  const bool inside = alpha > 0.0 && alpha < 1.0;
  const bool endpoint = alpha == 0.0 || alpha == 1.0;
  if (!inside && !(allow_endpoints && endpoint)) throw_invalid("combine_cfie: alpha must lie in (0, 1)");
  SystemMatrix out;
  out.formulation = Formulation::zc;
  out.k = ze.k;
  out.alpha = alpha;
  out.fingerprint = ze.fingerprint;
  if (alpha == 1.0) {
    out.values = ze.values;
  } else if (alpha == 0.0) {
    out.values = eta * zm.values;
  } else {
    out.values = alpha * ze.values + ((1.0 - alpha) * eta) * zm.values;
  }
  return out;
}

Eigen::MatrixXcd transformed_efie(const RwgBasis& basis, const OperatorSet& ops, const SparseMatrix& left,
                                  const SparseMatrix& right) {
  if (left.rows() != basis.size() || right.rows() != basis.size()) {
    throw_invalid("transformed_efie: transform rows must equal the RWG count");
  }
  const Eigen::SparseMatrix<cdouble> lc = left.cast<cdouble>(), rc = right.cast<cdouble>();
  const Eigen::MatrixXcd zr = ops.za * rc;
  Eigen::MatrixXcd out = Eigen::SparseMatrix<cdouble>(lc.transpose()) * zr;
  const Eigen::MatrixXd dl = divergence_of(basis, left);
  const Eigen::MatrixXd dr = divergence_of(basis, right);
  const cdouble factor = -1.0 / cdouble(0.0, ops.k);
  out += factor * (dl.transpose().cast<cdouble>() * (ops.vtt * dr.cast<cdouble>()));
  return out;
}

void validate_plane_wave(const PlaneWave& wave) {
  if (std::abs(wave.direction.norm() - 1.0) > 1e-9) throw_invalid("plane wave direction must be a unit vector");
  if (std::abs(wave.polarization.norm() - 1.0) > 1e-9) throw_invalid("plane wave polarization must be a unit vector");
  if (std::abs(wave.direction.dot(wave.polarization)) > 1e-9) {
    throw_invalid("plane wave polarization must be orthogonal to the direction");
  }
  if (!(wave.k > 0.0)) throw_invalid("plane wave wavenumber must be positive");
}

RhsParts plane_wave_parts(const RwgBasis& basis, const PlaneWave& wave) {
  validate_plane_wave(wave);
  const SurfaceMesh& mesh = basis.mesh;
  const int nf = mesh.num_triangles();
  const TriangleRule& rule = collapsed_gauss(6);
  std::vector<std::array<cdouble, 3>> ve(nf), vm(nf);
  for (int t = 0; t < nf; ++t) {
    const Vec3 p0 = mesh.vertex(t, 0), p1 = mesh.vertex(t, 1), p2 = mesh.vertex(t, 2);
    const Vec3 n = mesh.normal(t);
    ve[t] = {0.0, 0.0, 0.0};
    vm[t] = {0.0, 0.0, 0.0};
    for (int p = 0; p < rule.size(); ++p) {
      const Vec3 r = p0 + rule.uv[p][0] * (p1 - p0) + rule.uv[p][1] * (p2 - p0);
      const double phase = wave.k * wave.direction.dot(r);
      const cdouble e = wave.amplitude * cdouble(std::cos(phase), std::sin(phase));
      const Vec3 hdir = n.cross(wave.direction.cross(wave.polarization));
      for (int i = 0; i < 3; ++i) {
        // 2A * (r - p_i) / (2A) with the rule weight.
        const Vec3 a = r - mesh.vertex(t, i);
        ve[t][i] += rule.w[p] * e * a.dot(wave.polarization);
        vm[t][i] += rule.w[p] * e * a.dot(hdir);
      }
    }
  }
  RhsParts out;
  out.ve.resize(basis.size());
  out.eta_vm.resize(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    cdouble a = 0.0, b = 0.0;
    for (const Slot& s : slots(basis, i)) {
      a += s.sign * ve[s.triangle][s.local];
      b += s.sign * vm[s.triangle][s.local];
    }
    out.ve[i] = a;
    out.eta_vm[i] = b;
  }
  return out;
}

Eigen::VectorXcd plane_wave_rhs(const RwgBasis& basis, const PlaneWave& wave, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw_invalid("plane_wave_rhs: alpha must lie in [0, 1]");
  const RhsParts parts = plane_wave_parts(basis, wave);
  return alpha * parts.ve + (1.0 - alpha) * parts.eta_vm;
}

StaticBlocks static_limit_blocks(const RwgBasis& basis, const SparseTransform& loops, const SparseTransform& stars,
                                 double k_small, const QuadratureOptions& opts) {
  check_k(k_small);
  const OperatorSet ops = assemble_operators(basis, k_small, false, opts);
  const double sk = std::sqrt(k_small);
  const SparseMatrix l = loops.matrix / sk;
  const SparseMatrix s = stars.matrix * sk;
  StaticBlocks b;
  b.ll = transformed_efie(basis, ops, l, l);
  b.ls = transformed_efie(basis, ops, l, s);
  b.sl = transformed_efie(basis, ops, s, l);
  b.ss = transformed_efie(basis, ops, s, s);
  b.norm_ll = b.ll.norm();
  b.norm_ls = b.ls.norm();
  b.norm_sl = b.sl.norm();
  b.norm_ss = b.ss.norm();
  b.norm_total = std::sqrt(b.norm_ll * b.norm_ll + b.norm_ls * b.norm_ls + b.norm_sl * b.norm_sl +
                           b.norm_ss * b.norm_ss);
  return b;
}

}  // namespace cfie
