#include "common.hpp"

using namespace qlattice;
using namespace fixtures;

TEST_CASE("HermOp validates hermiticity") {
  CHECK_THROWS_AS(HermOp(mat2(0, 1, 0, 0)), InvalidOperator);
  CHECK_NOTHROW(HermOp(mat2(1, cplx(0, 1), cplx(0, -1), 2)));
  CHECK_THROWS_AS(HermOp(CMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("DensityOp validates trace and positivity") {
  CHECK(is_density(diag2(0.5, 0.5)));
  CHECK_FALSE(is_density(diag2(1.5, -0.5)));
  CHECK(is_density(HermOp(0.25 * CMatrix::Identity(4, 4))));
  CHECK_FALSE(is_density(diag2(0.5, 0.6)));
  CHECK_THROWS_AS(DensityOp(diag2(1.5, -0.5)), InvalidOperator);
}

TEST_CASE("hs_inner") {
  CHECK(hs_inner(I2(), I2()) == doctest::Approx(2.0));
  CHECK(hs_inner(sx(), sy()) == doctest::Approx(0.0));
  DensityOp p = DensityOp::pure(CVector::Random(3));
  CHECK(hs_inner(p.op(), p.op()) == doctest::Approx(1.0));
}

TEST_CASE("is_pure") {
  CHECK(is_pure(ket(2, 0)));
  CHECK_FALSE(is_pure(DensityOp::maximally_mixed(2)));
  CHECK_FALSE(is_pure(DensityOp(diag2(0.99, 0.01))));
}

TEST_CASE("expectation") {
  CHECK(expectation(DensityOp::maximally_mixed(2), sz()) == doctest::Approx(0.0));
  CHECK(expectation(ket(2, 0), sz()) == doctest::Approx(1.0));
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    DensityOp r1 = random_density(2, 2, rng), r2 = random_density(3, 2, rng);
    HermOp o1 = HermOp::unchecked(ginibre(2, 2, rng)), o2 = HermOp::unchecked(ginibre(3, 3, rng));
    CHECK(expectation(tensor(r1, r2), tensor(o1, o2)) ==
          doctest::Approx(expectation(r1, o1) * expectation(r2, o2)).epsilon(1e-10));
  }
}

TEST_CASE("tensor agrees with an index-loop Kronecker product") {
  CHECK((tensor(I2(), I2()).matrix() - CMatrix::Identity(4, 4)).norm() < 1e-14);
  DensityOp t = tensor(ket(2, 0), ket(2, 1));
  CHECK(std::abs(t.matrix()(1, 1) - 1.0) < 1e-14);
  CHECK(is_pure(t));
  Rng rng(3);
  for (int t2 = 0; t2 < 10; ++t2) {
    HermOp a = HermOp::unchecked(ginibre(2, 2, rng)), b = HermOp::unchecked(ginibre(3, 3, rng));
    CHECK((tensor(a, b).matrix() - oracle::kron(a.matrix(), b.matrix())).norm() < 1e-12);
    CHECK(tensor(a, b).trace() == doctest::Approx(a.trace() * b.trace()));
  }
}

TEST_CASE("partial trace and transpose agree with index loops") {
  const SpaceShape s23 = SpaceShape::bipartite(2, 3);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    DensityOp rho = random_density(6, 1 + t % 6, rng);
    for (int keep : {1, 2}) {
      CHECK((partial_trace(rho, s23, keep).matrix() - oracle::partial_trace(rho.matrix(), 2, 3, keep)).norm() < 1e-12);
    }
    CHECK((partial_transpose(rho.op(), s23).matrix() - oracle::partial_transpose(rho.matrix(), 2, 3)).norm() < 1e-12);
  }
  DensityOp r1 = random_density(2, 2, rng), r2 = random_density(3, 1, rng);
  CHECK((partial_trace(tensor(r1, r2), s23, 1).matrix() - r1.matrix()).norm() < 1e-12);
  CHECK((partial_trace(tensor(r1, r2), s23, 2).matrix() - r2.matrix()).norm() < 1e-12);

  BipartiteContext ctx(2, 2);
  CHECK((partial_trace(bell_state(ctx), ctx.shape(), 1).matrix() - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((partial_trace(DensityOp::maximally_mixed(4), ctx.shape(), 2).matrix() - 0.5 * CMatrix::Identity(2, 2)).norm() <
        1e-12);
  CHECK_THROWS_AS(partial_trace(DensityOp::maximally_mixed(4), s23, 1), DimensionError);
}

TEST_CASE("herm_basis is HS-orthonormal and complete") {
  for (int n : {1, 2, 3, 4}) {
    auto b = herm_basis(n);
    REQUIRE(static_cast<int>(b.size()) == n * n);
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) CHECK(std::abs(hs_inner(b[i], b[j]) - (i == j ? 1.0 : 0.0)) < 1e-10);
    Rng rng(n);
    HermOp a = HermOp::unchecked(ginibre(n, n, rng));
    CHECK((reconstruct(expand(a, b), b) - a).hs_norm() < 1e-12);
  }
}

TEST_CASE("coordinates are isometric") {
  Rng rng(9);
  for (int n : {2, 3}) {
    HermOp a = HermOp::unchecked(ginibre(n, n, rng)), b = HermOp::unchecked(ginibre(n, n, rng));
    CHECK(to_coords(a).dot(to_coords(b)) == doctest::Approx(hs_inner(a, b)).epsilon(1e-12));
    CHECK((from_coords(n, to_coords(a)) - a).hs_norm() < 1e-12);
  }
}

TEST_CASE("SpaceShape parsing") {
  CHECK(SpaceShape::parse("3") == SpaceShape::simple(3));
  CHECK(SpaceShape::parse("2x3") == SpaceShape::bipartite(2, 3));
  CHECK(SpaceShape::bipartite(2, 3).total() == 6);
  CHECK(SpaceShape::bipartite(2, 3).to_string() == "2x3");
  CHECK_THROWS(SpaceShape::parse("2x"));
  CHECK_THROWS(SpaceShape::parse("0"));
}

TEST_CASE("support_columns") {
  CMatrix cols = support_columns(diag2(0.7, 0.0), 1e-9);
  CHECK(cols.cols() == 1);
  CHECK(support_columns(DensityOp::maximally_mixed(3).op(), 1e-9).cols() == 3);
}
