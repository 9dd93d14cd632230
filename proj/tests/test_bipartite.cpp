#include "common.hpp"

#include "qlattice/detail/nnls.hpp"

using namespace qlattice;
using namespace fixtures;

TEST_CASE("nnls matches exhaustive enumeration") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 40; ++t) {
    const int rows = 3 + t % 5, cols = 2 + t % 6;
    RMatrix a(rows, cols);
    RVector b(rows);
    for (int i = 0; i < rows; ++i) {
      b(i) = g(rng);
      for (int j = 0; j < cols; ++j) a(i, j) = g(rng);
    }
    detail::NnlsResult r = detail::nnls(a, b);
    RVector ref = oracle::nnls_exhaustive(a, b);
    CHECK(r.x.minCoeff() >= 0.0);
    CHECK(r.residual == doctest::Approx((a * ref - b).norm()).epsilon(1e-9));
  }
}

TEST_CASE("psi examples") {
  BipartiteContext ctx(2, 3);
  Rng rng(2);
  DensityOp r1 = random_density(2, 2, rng), r2 = random_density(3, 2, rng);
  CHECK(equal(psi(atom(r1), atom(r2), ctx), atom(tensor(r1, r2), ctx.shape())));
  LatticeElement t = psi(LatticeElement::top(ctx.factor_shape(1)), LatticeElement::top(ctx.factor_shape(2)), ctx);
  CHECK(t.is_top());
  CHECK(t.rep().dim() == 36);
  CHECK(psi(random_element(2, 2, rng), LatticeElement::bottom(ctx.factor_shape(2)), ctx).is_bottom());
  CHECK_THROWS_AS(psi(random_element(3, 2, rng), random_element(3, 2, rng), ctx), DimensionError);
}

TEST_CASE("tau examples") {
  BipartiteContext ctx(2, 3);
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    LatticeElement a = random_element(2, 1 + i % 4, rng), b = random_element(3, 1 + i % 9, rng);
    LatticeElement l = psi(a, b, ctx);
    CHECK(equal(tau(l, 1, ctx), a));
    CHECK(equal(tau(l, 2, ctx), b));
  }
  DensityOp r1 = random_density(2, 1, rng), r2 = random_density(3, 3, rng);
  CHECK(equal(tau(atom(tensor(r1, r2), ctx.shape()), 1, ctx), atom(r1)));
  BipartiteContext c22(2, 2);
  CHECK(equal(tau(atom(bell_state(c22), c22.shape()), 1, c22), atom(DensityOp::maximally_mixed(2))));
}

TEST_CASE("partial transpose test") {
  BipartiteContext c22(2, 2), c23(2, 3), c33(3, 3);
  CHECK(ppt_min_eigenvalue(bell_state(c22), c22) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ppt_is_exact(c22));
  CHECK(ppt_is_exact(c23));
  CHECK_FALSE(ppt_is_exact(c33));
  // Werner family: smallest eigenvalue (1 - 3w) / 4
  for (int i = 0; i <= 20; ++i) {
    const double w = 0.05 * i;
    CHECK(ppt_min_eigenvalue(werner_state(w), c22) == doctest::Approx((1.0 - 3.0 * w) / 4.0).epsilon(1e-12));
  }
  Rng rng(4);
  DensityOp rho = random_density(6, 3, rng);
  CHECK(ppt_min_eigenvalue(rho, c23) == doctest::Approx(oracle::min_eig(oracle::partial_transpose(rho.matrix(), 2, 3))));
}

TEST_CASE("separability verdicts") {
  BipartiteContext c22(2, 2), c23(2, 3);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    BipartiteContext& ctx = t % 2 ? c23 : c22;
    DensityOp p = tensor(random_density(ctx.n1(), 1 + t % 2, rng), random_density(ctx.n2(), 1 + t % ctx.n2(), rng));
    SeparabilityVerdict v = is_separable(p, ctx);
    REQUIRE(v.status == SepStatus::separable);
    REQUIRE(v.decomposition);
    CHECK(reconstruction_error(*v.decomposition, p) <= 1e-7);
    for (double w : v.decomposition->weights) CHECK(w >= 0.0);
    for (const auto& x : v.decomposition->first) CHECK(is_density(x.op()));
  }
  SeparabilityVerdict bell = is_separable(bell_state(c22), c22);
  CHECK(bell.status == SepStatus::entangled);
  CHECK(bell.ppt_eigenvalue == doctest::Approx(-0.5));
  CHECK(is_separable(werner_state(0.5), c22).status == SepStatus::entangled);
  SeparabilityVerdict w = is_separable(werner_state(0.25), c22);
  CHECK(w.status == SepStatus::separable);
  CHECK(w.decomposition->residual <= 1e-7);
  CHECK(is_separable(werner_state(1.0 / 3.0), c22).status == SepStatus::separable);
}

TEST_CASE("convex tensor membership") {
  BipartiteContext ctx(2, 2);
  Rng rng(6);
  LatticeElement a = random_element(2, 2, rng), b = random_element(2, 3, rng);
  DensityOp x = *feasible_point(a.rep()).witness, y = *feasible_point(b.rep()).witness;
  MembershipResult m = convex_tensor_membership(tensor(x, y), a, b, ctx);
  REQUIRE(m.status == MembershipStatus::member);
  CHECK(contains(psi(a, b, ctx).rep(), tensor(x, y).op()));
  for (size_t k = 0; k < m.decomposition->weights.size(); ++k) {
    CHECK(contains(a.rep(), m.decomposition->first[k].op()));
    CHECK(contains(b.rep(), m.decomposition->second[k].op()));
  }
  const LatticeElement t1 = LatticeElement::top(ctx.factor_shape(1)), t2 = LatticeElement::top(ctx.factor_shape(2));
  CHECK(convex_tensor_membership(bell_state(ctx), t1, t2, ctx).status == MembershipStatus::outside);
  // a product state outside psi(a, b)
  LatticeElement a0 = atom(ket(2, 0)), b0 = atom(ket(2, 0));
  CHECK(convex_tensor_membership(tensor(ket(2, 1), ket(2, 1)), a0, b0, ctx).status == MembershipStatus::outside);
}

TEST_CASE("reports") {
  BipartiteContext ctx(2, 2);
  Rng rng(7);
  std::vector<LatticeElement> sample;
  for (int i = 0; i < 8; ++i) sample.push_back(random_element(2, 1 + i % 3, rng));
  sample.push_back(atom(ket(2, 0)));
  PsiSlotReport ps = psi_fixed_slot_report(sample, atom(random_density(2, 2, rng)), ctx);
  CHECK(ps.all_hold());
  CHECK(ps.product_witness);

  std::vector<std::pair<LatticeElement, LatticeElement>> pairs;
  for (int i = 0; i < 10; ++i) pairs.emplace_back(random_element(ctx.shape(), 1 + i % 4, rng), random_element(ctx.shape(), 2, rng));
  CHECK(tau_morphism_report(pairs, ctx, 9).all_hold());

  std::vector<std::pair<LatticeElement, LatticeElement>> fp;
  for (int i = 0; i < 10; ++i) fp.emplace_back(random_element(2, 1 + i % 4, rng), random_element(2, 1 + (i + 2) % 4, rng));
  ImPsiReport ir = im_psi_separability_report(fp, ctx, 10);
  CHECK(ir.all_hold());

  const SpaceShape s = ctx.shape();
  auto bounds = generate_sublattice({LatticeElement::bottom(s), LatticeElement::top(s)}, 10);
  CHECK(bounds.elements.size() == 2);
  auto two = generate_sublattice({atom(random_density(4, 4, rng), s), atom(random_density(4, 2, rng), s)}, 10);
  CHECK(two.elements.size() == 4);
  CHECK(is_closed_under_meet_join(two.elements));
  std::vector<LatticeElement> open{atom(ket(4, 0), s), atom(ket(4, 1), s)};
  CHECK_FALSE(is_closed_under_meet_join(open));
}
