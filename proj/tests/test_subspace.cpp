#include "common.hpp"

using namespace qlattice;
using namespace fixtures;

namespace {

HermSubspace random_subspace(int n, int k, Rng& rng) {
  std::vector<HermOp> g;
  for (int i = 0; i < k; ++i) g.push_back(HermOp::unchecked(ginibre(n, n, rng)));
  return span(g);
}

std::vector<CMatrix> mats(const HermSubspace& s) {
  std::vector<CMatrix> out;
  for (const auto& b : s.basis()) out.push_back(b.matrix());
  return out;
}

}  // namespace

TEST_CASE("span dimension") {
  CHECK(span({sx(), 2.0 * sx()}).dim() == 1);
  CHECK(span({I2(), sx(), sy(), sz()}).dim() == 4);
  CHECK(span_coords(2, RMatrix(4, 0)).is_zero());
  CHECK_THROWS_AS(span(std::vector<HermOp>{}), DimensionError);
  Rng rng(1);
  for (int k = 1; k <= 9; ++k) {
    HermSubspace s = random_subspace(3, k, rng);
    CHECK(s.dim() == k);
    CHECK(oracle::real_rank(mats(s)) == k);
    RMatrix gram = s.coords().transpose() * s.coords();
    CHECK((gram - RMatrix::Identity(k, k)).norm() < 1e-10);
  }
}

TEST_CASE("intersect") {
  HermSubspace r = intersect(span({I2(), sz()}), span({I2(), sx()}));
  CHECK(r.dim() == 1);
  CHECK(contains(r, I2()));
  Rng rng(2);
  HermSubspace s = random_subspace(3, 5, rng);
  CHECK(subspace_equal(intersect(s, s), s));
  CHECK(intersect(s, HermSubspace::zero(3)).is_zero());
}

TEST_CASE("sum and inclusion-exclusion") {
  CHECK(sum(span({sx()}), span({sy()})).dim() == 2);
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 2;
    HermSubspace s = random_subspace(n, 1 + t % (n * n), rng);
    HermSubspace u = random_subspace(n, 1 + (3 * t) % (n * n), rng);
    // a shared direction so the intersection is nontrivial
    HermSubspace s2 = sum(s, span({u.basis_op(0)}));
    CHECK(sum(s2, u).dim() + intersect(s2, u).dim() == s2.dim() + u.dim());
    CHECK(contains(s2, intersect(s2, u)));
    CHECK(subspace_equal(sum(s, HermSubspace::zero(n)), s));
  }
}

TEST_CASE("orth_complement") {
  HermSubspace c = orth_complement(span({I2()}));
  CHECK(c.dim() == 3);
  CHECK(contains(c, sx()));
  CHECK(contains(c, sy()));
  CHECK(contains(c, sz()));
  CHECK(orth_complement(HermSubspace::zero(2)).dim() == 4);
  Rng rng(4);
  HermSubspace s = random_subspace(3, 4, rng);
  CHECK(subspace_equal(orth_complement(orth_complement(s)), s));
}

TEST_CASE("contains") {
  CHECK(contains(span({I2(), sz()}), diag2(0.3, 0.7)));
  CHECK_FALSE(contains(span({sz()}), I2()));
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    HermSubspace s = random_subspace(3, 6, rng), u = random_subspace(3, 6, rng);
    HermSubspace i = intersect(s, u);
    CHECK(contains(s, i));
    for (const auto& b : i.basis()) CHECK(oracle::in_real_span(mats(u), b.matrix()));
  }
}

TEST_CASE("principal angles") {
  CHECK(max_principal_angle(span({sx()}), span({2.0 * sx()})) < 1e-12);
  CHECK(max_principal_angle(span({sx()}), span({sy()})) == doctest::Approx(M_PI / 2));
  CHECK(max_principal_angle(span({sx()}), span({sx(), sy()})) == doctest::Approx(M_PI / 2));
}
