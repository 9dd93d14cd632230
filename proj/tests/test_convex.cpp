#include "common.hpp"

using namespace qlattice;
using namespace fixtures;

TEST_CASE("feasible_point") {
  Rng rng(1);
  DensityOp rho = random_density(3, 2, rng);
  FeasibilityResult f = feasible_point(span({rho.op()}));
  REQUIRE(f.status == Feasibility::feasible);
  CHECK((f.witness->matrix() - rho.matrix()).norm() < 1e-8);

  CHECK(feasible_point(span({sz()})).status == Feasibility::empty);

  FeasibilityResult d = feasible_point(span({diag2(1, 0), diag2(0, 1)}));
  REQUIRE(d.status == Feasibility::feasible);
  CHECK((d.witness->matrix() - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-6);
  CHECK(d.best_lambda_min == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("minimal_face examples") {
  FaceCertificate full = minimal_face(HermSubspace::full(2));
  CHECK((full.support.matrix() - CMatrix::Identity(2, 2)).norm() < 1e-8);

  FaceCertificate f = minimal_face(span({ket(2, 0).op(), sx()}));
  CHECK((f.support.matrix() - ket(2, 0).matrix()).norm() < 1e-8);
  REQUIRE_FALSE(f.reduction_steps.empty());
  for (const auto& z : f.reduction_steps) {
    CHECK(z.min_eigenvalue() >= -1e-9);
    CHECK(z.hs_norm() > 0.0);
    CHECK(std::abs(hs_inner(z, ket(2, 0).op())) <= 1e-9);
  }

  Rng rng(2);
  FaceCertificate g = minimal_face(span({random_density(3, 3, rng).op()}));
  CHECK((g.support.matrix() - CMatrix::Identity(3, 3)).norm() < 1e-8);
  CHECK(g.reduction_steps.empty());

  CHECK_THROWS_AS(minimal_face(span({sz()})), std::invalid_argument);
}

TEST_CASE("minimal_face with a widely spread certificate") {
  // the only certificate for the complement of N is N itself
  Rng rng(17);
  CMatrix u = ginibre(4, 4, rng).householderQr().householderQ();
  RVector spectrum(4);
  spectrum << 1.0, 1e-5, 0.0, 0.0;
  HermOp normal = HermOp::unchecked(u * spectrum.cast<cplx>().asDiagonal() * u.adjoint());
  FaceCertificate f = minimal_face(orth_complement(span({normal})));
  CMatrix kernel = u.rightCols(2) * u.rightCols(2).adjoint();
  CHECK((f.support.matrix() - kernel).norm() < 1e-7);
}

TEST_CASE("certificate invariants on random boundary instances") {
  Rng rng(3);
  for (int t = 0; t < 40; ++t) {
    const int n = 2 + t % 2;
    // low-rank density plus random Hermitian directions: generically tangent
    std::vector<HermOp> gens{random_density(n, 1 + t % (n - 1), rng).op()};
    for (int i = 0; i < 1 + t % 3; ++i) gens.push_back(HermOp::unchecked(ginibre(n, n, rng)));
    HermSubspace s = span(gens);
    ClosureResult c = close_subspace(s);
    if (!c.face) {
      CHECK(c.closure.is_zero());
      continue;
    }
    const FaceCertificate& f = *c.face;
    const CMatrix& p = f.support.matrix();
    CHECK((p * p - p).norm() < 1e-8);
    // interior point lives on range(P) and is positive definite there
    CHECK((p * f.interior_point.matrix() * p - f.interior_point.matrix()).norm() < 1e-8);
    CMatrix cols = support_columns(f.support, 0.5);
    CMatrix comp = cols.adjoint() * f.interior_point.matrix() * cols;
    CHECK(oracle::min_eig(comp) >= Tolerances{}.interior);
    CHECK(contains(s, f.interior_point.op(), Tolerances{}));
    for (const auto& z : f.reduction_steps) CHECK(z.min_eigenvalue() >= -1e-9);
    // sampled feasible points are orthogonal to every reduction step
    StateBody body = state_body(c.closure);
    for (const auto& x : sample_body(body, 5, rng)) {
      CHECK(x.op().min_eigenvalue() >= -1e-9);
      CHECK(contains(s, x.op()));
      for (const auto& z : f.reduction_steps) CHECK(hs_inner(z, x.op()) <= 1e-8);
    }
  }
}

TEST_CASE("good_representative examples") {
  Rng rng(4);
  DensityOp rho = random_density(3, 2, rng);
  CHECK(good_representative(span({rho.op()})).dim() == 1);
  CHECK(good_representative(span({sz()})).is_zero());
  HermSubspace g = good_representative(span({ket(2, 0).op(), sx()}));
  CHECK(g.dim() == 1);
  CHECK(contains(g, ket(2, 0).op()));
  CHECK(good_representative(span({diag2(1, 0), diag2(0, 1)})).dim() == 2);
  CHECK(good_representative(HermSubspace::full(3)).dim() == 9);
}

TEST_CASE("good_representative against the sampling oracle") {
  Rng rng(5);
  for (int t = 0; t < 12; ++t) {
    const int n = 2 + t % 2;
    std::vector<HermOp> gens;
    for (int i = 0; i < 1 + t % 3; ++i) gens.push_back(HermOp::unchecked(ginibre(n, n, rng)));
    HermSubspace s = span(gens);
    HermSubspace g = good_representative(s);
    try {
      HermSubspace o = brute_force_span(s, 4000, 100 + t);
      CHECK(max_principal_angle(g, o) <= 1e-6);
    } catch (const OracleInconclusive&) {
      CHECK(g.is_zero());
    }
  }
}

TEST_CASE("state_body and linear_maximize") {
  Rng rng(6);
  StateBody full = state_body(HermSubspace::full(3));
  CHECK(full.is_full());
  HermOp c = HermOp::unchecked(ginibre(3, 3, rng));
  DensityOp x = linear_maximize(full, c);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c.matrix());
  CHECK(expectation(x, c) == doctest::Approx(es.eigenvalues()(2)).epsilon(1e-8));

  // diagonal qubit states: maximum of tr(c X) is the larger diagonal entry
  StateBody seg = state_body(span({diag2(1, 0), diag2(0, 1)}));
  CHECK_FALSE(seg.is_full());
  DensityOp y = linear_maximize(seg, diag2(0.2, 0.9));
  CHECK(expectation(y, diag2(0.2, 0.9)) == doctest::Approx(0.9).epsilon(1e-6));
  for (const auto& p : sample_body(seg, 10, rng)) {
    CHECK(std::abs(p.matrix()(0, 1)) < 1e-9);
    CHECK(p.op().min_eigenvalue() >= -1e-9);
  }
}

TEST_CASE("oracle rejects what it cannot sample") {
  CHECK_THROWS_AS(brute_force_sample(span({sz()}), 100, 1), OracleInconclusive);
  CHECK_THROWS_AS(brute_force_sample(HermSubspace::zero(2), 100, 1), OracleInconclusive);
  CHECK_THROWS_AS(brute_force_sample(HermSubspace::full(3), 100, 1), DimensionError);
}
