#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "cfie/assembly.hpp"
#include "cfie/basis.hpp"
#include "cfie/quadrature.hpp"
#include "support.hpp"

using namespace cfie;
using support::cdouble;

namespace {

struct Fixture {
  RwgBasis basis;
  double k;
  OperatorSet ops;
  Fixture(const SurfaceMesh& m, double f_hz) : basis(rwg_space(m)), k(wavenumber(f_hz)), ops(assemble_operators(basis, k, true)) {}
};

const Fixture& cube_1mhz() {
  static const Fixture f(generate_cube_mesh(1.0, 1), 1e6);
  return f;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule& g = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], deg);
      CHECK(s == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("triangle rules integrate monomials") {
  // int_T u^a v^b = a! b! / (a + b + 2)!
  auto exact = [](int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); };
  auto run = [&](const TriangleRule& r, int degree) {
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double s = 0.0;
        for (int p = 0; p < r.size(); ++p) s += r.w[p] * std::pow(r.uv[p][0], a) * std::pow(r.uv[p][1], b);
        CHECK(s == doctest::Approx(exact(a, b)).epsilon(1e-13));
      }
    }
  };
  run(seven_point_rule(), 5);
  for (int n = 1; n <= 8; ++n) run(collapsed_gauss(n), 2 * n - 2);
}

TEST_CASE("Sauter-Schwab rules") {
  for (int common = 1; common <= 3; ++common) {
    for (int order : {3, 5, 8}) {
      const PairRule& r = sauter_schwab(common, order);
      double s = 0.0;
      for (double w : r.w) s += w;
      CHECK(s == doctest::Approx(0.25).epsilon(1e-12));
    }
  }
}

TEST_CASE("regular pair order tiers") {
  CHECK(regular_pair_order(1.5) == 8);
  CHECK(regular_pair_order(3.0) == 6);
  CHECK(regular_pair_order(5.0) == 5);
  CHECK(regular_pair_order(10.0) == 4);
  CHECK(regular_pair_order(50.0) == 3);
  CHECK(regular_pair_order(50.0, 2) == 5);
}

TEST_CASE("far pair on two tetrahedra matches the quadrature oracle") {
  const SurfaceMesh m = support::two_tetrahedra(3.0);
  const int t = 0, u = 4 + 2;
  REQUIRE_FALSE(support::touching(m, t, u));
  const auto ref = support::pair_reference(m, t, u, 1.0);
  CHECK(support::pair_error(m, t, u, pair_integrals(m, t, u, 1.0, true), ref) <= 1e-8);
}

TEST_CASE("far pairs on a refined cube match the quadrature oracle") {
  const RefinementHierarchy h = dyadic_refine(generate_cube_mesh(1.0, 1), 2);
  const SurfaceMesh& m = h.fine();
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, m.num_triangles() - 1);
  int tested = 0;
  for (double f : {1e6, 2e8}) {
    const double k = wavenumber(f);
    for (int found = 0; found < 3;) {
      const int t = pick(rng), u = pick(rng);
      if (support::touching(m, t, u) || support::separation(m, t, u) < 1.0) continue;
      ++found;
      ++tested;
      CHECK(support::pair_error(m, t, u, pair_integrals(m, t, u, k, true), support::pair_reference(m, t, u, k)) <=
            1e-8);
    }
  }
  CHECK(tested == 6);
}

TEST_CASE("touching pairs converge in the Sauter-Schwab order") {
  const SurfaceMesh tet = support::tetrahedron();
  QuadratureOptions hi;
  hi.singular_order = 14;
  for (int u = 0; u < 4; ++u) {
    const PairIntegrals a = pair_integrals(tet, 0, u, 1.0, true);
    const PairIntegrals b = pair_integrals(tet, 0, u, 1.0, true, hi);
    CHECK((a.a - b.a).norm() <= 1e-6 * b.a.norm());
    CHECK(support::relative(a.v, b.v) <= 1e-6);
    if (u > 0) CHECK((a.kt - b.kt).norm() <= 1e-5 * b.kt.norm());
  }
}

TEST_CASE("pair integrals are symmetric under exchange") {
  const RefinementHierarchy h = dyadic_refine(generate_cube_mesh(1.0, 1), 1);
  const SurfaceMesh& m = h.fine();
  const double k = wavenumber(1e8);
  for (auto [t, u] : {std::pair{0, 1}, {0, 7}, {3, 40}, {5, 5}}) {
    const PairIntegrals p = pair_integrals(m, t, u, k, true);
    const PairIntegrals q = pair_integrals(m, u, t, k, true);
    CHECK((p.a - q.a.transpose()).norm() <= 1e-12 * p.a.norm());
    CHECK(support::relative(p.v, q.v) <= 1e-12);
    CHECK((p.ku - q.kt).norm() <= 1e-10 * (1.0 + p.kt.norm()));
  }
}

TEST_CASE("EFIE matrix") {
  const Fixture& f = cube_1mhz();
  const SystemMatrix ze = efie_matrix(f.basis, f.ops);
  CHECK((ze.values - ze.values.transpose()).norm() / ze.values.norm() <= 1e-10);

  const SystemMatrix zphi = scalar_potential(f.basis, f.ops);
  const SparseTransform loops = loop_matrix(f.basis.topology, false);
  const Eigen::MatrixXcd zl = zphi.values * support::dense(loops.matrix).cast<cdouble>();
  CHECK(zl.norm() <= 1e-12 * zphi.values.norm() * loops.matrix.norm());

  const EfieMatrices parts = assemble_efie(f.basis, f.k);
  CHECK((parts.za.values + parts.zphi.values - ze.values).norm() <= 1e-12 * ze.values.norm());
}

TEST_CASE("Gram matrix") {
  const SurfaceMesh tet = support::tetrahedron();
  const RwgBasis b = rwg_space(tet);
  const Eigen::MatrixXd g = assemble_gram(b).values.real();
  for (int i = 0; i < b.size(); ++i) CHECK(g(i, i) > 0.0);
  CHECK((g - g.transpose()).norm() == doctest::Approx(0.0));

  // Brute-force oracle on each triangle: the integrand is quadratic, so the
  // 7-point rule is exact.
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(b.size(), b.size());
  for (int t = 0; t < tet.num_triangles(); ++t) {
    const auto pts = support::composite_points(tet.vertex(t, 0), tet.vertex(t, 1), tet.vertex(t, 2), 2);
    for (int i = 0; i < b.size(); ++i) {
      for (int j = 0; j < b.size(); ++j) {
        auto f = [&](int n, const Vec3& r) -> Vec3 {
          const RwgFunction& fn = b.functions[n];
          const double a = tet.area(t);
          if (fn.plus == t) return (r - tet.vertices[fn.free_plus]) / (2.0 * a);
          if (fn.minus == t) return (tet.vertices[fn.free_minus] - r) / (2.0 * a);
          return Vec3::Zero();
        };
        for (const auto& [r, w] : pts) ref(i, j) += w * f(i, r).dot(f(j, r));
      }
    }
  }
  CHECK((g - ref).norm() <= 1e-10 * ref.norm());

  const RwgBasis cb = rwg_space(generate_cube_mesh(1.0, 2));
  const Eigen::MatrixXd gc = assemble_gram(cb).values.real();
  for (int i = 0; i < cb.size(); ++i) {
    for (int j = 0; j < cb.size(); ++j) {
      const auto& fi = cb.functions[i];
      const auto& fj = cb.functions[j];
      const bool share = fi.plus == fj.plus || fi.plus == fj.minus || fi.minus == fj.plus || fi.minus == fj.minus;
      if (!share) CHECK(gc(i, j) == 0.0);
    }
  }
}

TEST_CASE("MFIE matrix") {
  const Fixture& f = cube_1mhz();
  const SystemMatrix zm = mfie_matrix(f.ops);
  const Eigen::MatrixXcd g = f.ops.gram.cast<cdouble>();
  const Eigen::MatrixXcd a = g.partialPivLu().solve(zm.values);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
  CHECK(sv(sv.size() - 1) >= 0.1);

  SUBCASE("static double layer baseline") {
    const RwgBasis b = rwg_space(generate_cube_mesh(1.0, 1));
    const OperatorSet ops = assemble_operators(b, 1e-6, true);
    const double ratio = ops.kmat.norm() / (0.5 * ops.gram.norm());
    CHECK(ratio == doctest::Approx(0.3549994523).epsilon(1e-6));
  }
  CHECK_THROWS_AS(mfie_matrix(assemble_operators(f.basis, f.k, false)), std::invalid_argument);
}

TEST_CASE("CFIE combination") {
  const Fixture& f = cube_1mhz();
  const SystemMatrix ze = efie_matrix(f.basis, f.ops), zm = mfie_matrix(f.ops);
  const double eta = kEta0;
  CHECK((combine_cfie(ze, zm, 1.0, eta, true).values - ze.values).norm() == 0.0);
  CHECK((combine_cfie(ze, zm, 0.0, eta, true).values - eta * zm.values).norm() == 0.0);
  const SystemMatrix zc = combine_cfie(ze, zm, 0.5, eta);
  CHECK((zc.values - 0.5 * ze.values - 0.5 * eta * zm.values).norm() <= 1e-15 * zc.values.norm());
  CHECK_THROWS_AS(combine_cfie(ze, zm, 0.0, eta), std::invalid_argument);
  CHECK_THROWS_AS(combine_cfie(ze, zm, 1.2, eta, true), std::invalid_argument);
}

TEST_CASE("plane wave excitation") {
  const RwgBasis b = rwg_space(generate_cube_mesh(1.0, 2));
  PlaneWave w;
  w.k = wavenumber(1e8);
  const RhsParts one = plane_wave_parts(b, w);
  w.amplitude = 2.0;
  const RhsParts two = plane_wave_parts(b, w);
  CHECK((two.ve - 2.0 * one.ve).norm() == 0.0);
  CHECK((two.eta_vm - 2.0 * one.eta_vm).norm() == 0.0);
  CHECK((plane_wave_rhs(b, w, 0.5) - 0.5 * two.ve - 0.5 * two.eta_vm).norm() <= 1e-15 * two.ve.norm());

  SUBCASE("static limit") {
    PlaneWave s;
    s.k = 1e-12;
    const RhsParts p = plane_wave_parts(b, s);
    // int_T (r - p) / (2 A) . e = (c - p) . e / 2 on each triangle.
    Eigen::VectorXcd ref(b.size());
    for (int i = 0; i < b.size(); ++i) {
      const RwgFunction& fn = b.functions[i];
      const Vec3 cp = b.mesh.centroid(fn.plus) - b.mesh.vertices[fn.free_plus];
      const Vec3 cm = b.mesh.centroid(fn.minus) - b.mesh.vertices[fn.free_minus];
      ref(i) = 0.5 * (cp - cm).dot(s.polarization);
    }
    CHECK((p.ve - ref).norm() <= 1e-10 * ref.norm());
  }
  SUBCASE("invalid waves") {
    PlaneWave bad;
    bad.polarization = Vec3(1.0, 0.0, 0.1).normalized();
    CHECK_THROWS_AS(validate_plane_wave(bad), std::invalid_argument);
    bad = PlaneWave{};
    bad.direction = Vec3(0.0, 0.0, -2.0);
    CHECK_THROWS_AS(validate_plane_wave(bad), std::invalid_argument);
    bad = PlaneWave{};
    bad.k = 0.0;
    CHECK_THROWS_AS(plane_wave_parts(b, bad), std::invalid_argument);
  }
}

TEST_CASE("transformed EFIE matches the explicit congruence") {
  const Fixture& f = cube_1mhz();
  const SparseTransform t = composite_basis(loop_matrix(f.basis.topology, true), 0.0,
                                            star_matrix(f.basis.topology, true), f.k);
  const Eigen::MatrixXcd td = support::dense(t.matrix).cast<cdouble>();
  const Eigen::MatrixXcd explicit_form = td.transpose() * efie_matrix(f.basis, f.ops).values * td;
  const Eigen::MatrixXcd factored = transformed_efie(f.basis, f.ops, t.matrix, t.matrix);
  CHECK((factored - explicit_form).norm() <= 1e-9 * explicit_form.norm());
}

TEST_CASE("static limit blocks") {
  const RwgBasis b = rwg_space(generate_cube_mesh(1.0, 1));
  const SparseTransform l = loop_matrix(b.topology, true), s = star_matrix(b.topology, true);
  double last = 1e300;
  for (double k : {1e-2, 1e-4, 1e-6}) {
    const double r = static_limit_blocks(b, l, s, k).off_diagonal_ratio();
    CHECK(r < last);
    last = r;
  }
  const StaticBlocks b8 = static_limit_blocks(b, l, s, 1e-8);
  const StaticBlocks b9 = static_limit_blocks(b, l, s, 1e-9);
  CHECK((b8.ll - b9.ll).norm() <= 1e-3 * b9.ll.norm());

  // The star block tends to a fixed phase times a positive definite matrix.
  const cdouble phase = b8.ss(0, 0) / std::abs(b8.ss(0, 0));
  const Eigen::MatrixXcd ss = b8.ss / phase;
  const Eigen::MatrixXcd herm = 0.5 * (ss + ss.adjoint());
  CHECK((ss - herm).norm() <= 1e-3 * herm.norm());
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm).eigenvalues();
  CHECK(ev(0) > 0.0);
}
