#include <doctest.h>

#include <cmath>

#include <Eigen/LU>

#include "cfie/krylov.hpp"
#include "cfie/preconditioners.hpp"
#include "cfie/schemes.hpp"
#include "support.hpp"

using namespace cfie;
using support::cdouble;

namespace {

LinearOperator of(const Eigen::MatrixXcd& a) {
  return [a](const CVector& x) { return CVector(a * x); };
}

Eigen::MatrixXcd diagonal(std::initializer_list<double> d) {
  Eigen::VectorXcd v(d.size());
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

}  // namespace

TEST_CASE("GMRES finite termination") {
  const CVector b = CVector::Ones(5);
  {
    const SolveReport r = gmres(of(Eigen::MatrixXcd::Identity(5, 5)), b);
    CHECK(r.iterations == 1);
    CHECK(r.converged);
    CHECK((r.x - b).norm() <= 1e-14);
  }
  {
    GmresOptions o;
    o.tol = 1e-12;
    const SolveReport r = gmres(of(diagonal({1, 2, 3, 4, 5})), b, o);
    CHECK(r.converged);
    CHECK(r.iterations <= 5);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(r.x(i) - 1.0 / (i + 1)) <= 1e-12);
  }
}

TEST_CASE("GMRES residual history") {
  const Eigen::MatrixXcd a = support::random_complex(30, 30, 1) + 8.0 * Eigen::MatrixXcd::Identity(30, 30);
  const CVector b = support::random_complex(30, 1, 2).col(0);
  const SolveReport r = gmres(of(a), b);
  REQUIRE(r.converged);
  CHECK(r.residuals.front() == 1.0);
  CHECK(static_cast<int>(r.residuals.size()) == r.iterations + 1);
  for (size_t i = 1; i < r.residuals.size(); ++i) CHECK(r.residuals[i] <= r.residuals[i - 1] * (1.0 + 1e-12));
  CHECK(r.achieved() <= 1e-6);
  // The recorded residual matches the true one for an unpreconditioned solve.
  CHECK((b - a * r.x).norm() / b.norm() == doctest::Approx(r.achieved()).epsilon(1e-4));
}

TEST_CASE("GMRES restart and iteration cap") {
  const Eigen::MatrixXcd a = support::random_complex(40, 40, 3) + 10.0 * Eigen::MatrixXcd::Identity(40, 40);
  const CVector b = support::random_complex(40, 1, 4).col(0);
  GmresOptions o;
  o.restart = 5;
  const SolveReport r = gmres(of(a), b, o);
  CHECK(r.converged);
  CHECK((b - a * r.x).norm() <= 1e-5 * b.norm());

  GmresOptions capped;
  capped.max_iter = 3;
  capped.tol = 1e-14;
  const SolveReport c = gmres(of(a), b, capped);
  CHECK_FALSE(c.converged);
  CHECK(c.iterations == 3);
  CHECK_THROWS_AS(gmres(of(a), CVector::Zero(40)), std::invalid_argument);
}

TEST_CASE("left-preconditioned GMRES") {
  const Eigen::MatrixXcd a = diagonal({1, 10, 100, 1000}) + 0.1 * support::random_complex(4, 4, 5);
  const Eigen::MatrixXcd inv = a.inverse();
  const CVector b = CVector::Ones(4);
  const SolveReport r = gmres(of(a), b, {}, of(inv));
  CHECK(r.iterations == 1);
  CHECK((a * r.x - b).norm() <= 1e-10);
}

TEST_CASE("GMRES on the cube CFIE matches the direct solve") {
  const Problem p =
      make_problem(std::make_shared<const RefinementHierarchy>(dyadic_refine(generate_cube_mesh(1.0, 1), 0)), "cube",
                   1e6);
  const SolveReport r = gmres(of(p.zc.values), p.vc);
  REQUIRE(r.converged);
  const CVector ref = direct_solve(p, Equation::cfie);
  CHECK((r.x - ref).norm() <= 1e-5 * ref.norm());
}

TEST_CASE("CG") {
  {
    Eigen::MatrixXcd d = diagonal({1, 2, 3});
    const SolveReport r = cg(of(d), CVector::Ones(3));
    CHECK(r.converged);
    CHECK(std::abs(r.x(0) - 1.0) <= 1e-12);
    CHECK(std::abs(r.x(1) - 0.5) <= 1e-12);
    CHECK(std::abs(r.x(2) - 1.0 / 3.0) <= 1e-12);
  }
  SUBCASE("Hilbert matrix") {
    Eigen::MatrixXcd h(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) h(i, j) = 1.0 / (i + j + 1);
    }
    const CVector b = CVector::Ones(4);
    const SolveReport r = cg(of(h), b);
    const CVector ref = h.partialPivLu().solve(b);
    CHECK((r.x - ref).norm() <= 1e-8 * ref.norm());
  }
  SUBCASE("tetrahedron Laplacian with deflation") {
    const Topology topo = build_topology(support::tetrahedron());
    const ProjectorContext ctx = make_projector_context(topo);
    const Eigen::MatrixXcd l = support::dense(ctx.laplacian).cast<cdouble>();
    const CVector x = support::random_complex(6, 1, 6).col(0);
    const CVector b = support::dense(ctx.loops.matrix).transpose().cast<cdouble>() * x;
    const SolveReport r = cg(of(l), b, {}, ctx.deflation);
    CHECK(r.converged);
    CHECK(std::abs(r.x.sum()) <= 1e-12 * r.x.norm());
    CHECK((l * r.x - b).norm() <= 1e-12 * b.norm());
  }
  SUBCASE("cube(1, 2) Laplacian against the pseudo-inverse") {
    const Topology topo = build_topology(generate_cube_mesh(1.0, 2));
    const ProjectorContext ctx = make_projector_context(topo);
    const Eigen::MatrixXd l = support::dense(ctx.laplacian);
    CVector b = support::random_complex(l.rows(), 1, 7).col(0);
    b.array() -= b.mean();
    const CVector ref = support::symmetric_pinv(l).cast<cdouble>() * b;
    const SolveReport r = cg(of(l.cast<cdouble>()), b, {}, ctx.deflation);
    CHECK((r.x - ref).norm() <= 1e-8 * ref.norm());
  }
  SUBCASE("negative curvature") {
    CHECK_THROWS_AS(cg(of(diagonal({1, -2, 3})), CVector::Ones(3)), std::domain_error);
  }
}
