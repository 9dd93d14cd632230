#include "qlattice/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/KroneckerProduct>

#include "qlattice/detail/nnls.hpp"
#include "qlattice/random.hpp"

namespace qlattice {

BipartiteContext::BipartiteContext(int n1, int n2) : BipartiteContext(SpaceShape::bipartite(n1, n2)) {}

BipartiteContext::BipartiteContext(const SpaceShape& shape) : shape_(shape) {
  if (!shape_.is_bipartite()) throw DimensionError("bipartite context needs a two-factor shape");
}

namespace {

void require_factor(const LatticeElement& e, const BipartiteContext& ctx, int i, const char* what) {
  if (e.hilbert_dim() != (i == 1 ? ctx.n1() : ctx.n2())) {
    throw DimensionError(std::string(what) + ": element does not live on factor " + std::to_string(i));
  }
}

void require_total(int dim, const BipartiteContext& ctx, const char* what) {
  if (dim != ctx.total()) throw DimensionError(std::string(what) + ": dimension does not match " + ctx.shape().to_string());
}

// Row/column index of |i>|k> is i * n2 + k.

// tr_2[R (I ⊗ y)]
CMatrix contract_second(const CMatrix& r, const CMatrix& y, int n1, int n2) {
  CMatrix m = CMatrix::Zero(n1, n1);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n2; ++k)
        for (int l = 0; l < n2; ++l) s += r(i * n2 + k, j * n2 + l) * y(l, k);
      m(i, j) = s;
    }
  return m;
}

// tr_1[R (x ⊗ I)]
CMatrix contract_first(const CMatrix& r, const CMatrix& x, int n1, int n2) {
  CMatrix m = CMatrix::Zero(n2, n2);
  for (int k = 0; k < n2; ++k)
    for (int l = 0; l < n2; ++l) {
      cplx s = 0.0;
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j) s += r(i * n2 + k, j * n2 + l) * x(j, i);
      m(k, l) = s;
    }
  return m;
}

// Pure states whose convex hull contains I/n in its interior:
// |i>, (|i> ± |j>)/√2, (|i> ± i|j>)/√2.
std::vector<DensityOp> frame_states(int n) {
  std::vector<DensityOp> out;
  for (int i = 0; i < n; ++i) out.push_back(DensityOp::pure(CVector::Unit(n, i)));
  const double h = 1.0 / std::sqrt(2.0);
  const cplx phases[] = {1.0, -1.0, cplx(0, 1), cplx(0, -1)};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (cplx ph : phases) {
        CVector v = CVector::Zero(n);
        v(i) = h;
        v(j) = h * ph;
        out.push_back(DensityOp::pure(v));
      }
  return out;
}

HermOp herm_part(const CMatrix& m) { return HermOp::unchecked(0.5 * (m + m.adjoint())); }

std::vector<DensityOp> eigen_states(const HermOp& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix());
  std::vector<DensityOp> out;
  for (Eigen::Index i = 0; i < es.eigenvectors().cols(); ++i) out.push_back(DensityOp::pure(es.eigenvectors().col(i)));
  return out;
}

struct Atom {
  DensityOp x, y;
  RVector coords;
};

class Pool {
 public:
  explicit Pool(int n1, int n2) : n1_(n1), n2_(n2) {}
  void add(const DensityOp& x, const DensityOp& y) { atoms_.push_back({x, y, to_coords(tensor(x.op(), y.op()))}); }
  size_t size() const { return atoms_.size(); }
  const Atom& operator[](size_t i) const { return atoms_[i]; }
  RMatrix matrix() const {
    RMatrix a(n1_ * n1_ * n2_ * n2_, static_cast<Eigen::Index>(atoms_.size()));
    for (size_t i = 0; i < atoms_.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = atoms_[i].coords;
    return a;
  }
  void keep(const std::vector<bool>& mask) {
    std::vector<Atom> next;
    for (size_t i = 0; i < atoms_.size(); ++i)
      if (mask[i]) next.push_back(std::move(atoms_[i]));
    atoms_ = std::move(next);
  }

 private:
  int n1_, n2_;
  std::vector<Atom> atoms_;
};

class SideSampler {
 public:
  SideSampler(const StateBody& body, Rng& rng) : body_(body), rng_(rng) {}
  DensityOp draw() {
    if (body_.is_full()) return DensityOp::pure(haar_state(body_.n, rng_));
    return sample_body(body_, 1, rng_).front();
  }
  std::vector<DensityOp> fixed() const {
    if (body_.is_full()) return frame_states(body_.n);
    return {DensityOp(body_.center)};
  }

 private:
  const StateBody& body_;
  Rng& rng_;
};

}  // namespace

LatticeElement psi(const LatticeElement& a, const LatticeElement& b, const BipartiteContext& ctx,
                   const Settings& settings) {
  require_factor(a, ctx, 1, "psi");
  require_factor(b, ctx, 2, "psi");
  if (a.is_bottom() || b.is_bottom()) return LatticeElement::bottom(ctx.shape());
  if (a.is_top() && b.is_top()) return LatticeElement::top(ctx.shape());
  const int n = ctx.total();
  RMatrix cols(n * n, a.rep().dim() * b.rep().dim());
  Eigen::Index c = 0;
  // products of orthonormal bases are orthonormal
  for (int i = 0; i < a.rep().dim(); ++i) {
    HermOp x = a.rep().basis_op(i);
    for (int j = 0; j < b.rep().dim(); ++j) cols.col(c++) = to_coords(tensor(x, b.rep().basis_op(j)));
  }
  HermSubspace rep = HermSubspace::from_orthonormal(n, std::move(cols));
  if (verify_joins()) return LatticeElement::from_good(rep, ctx.shape(), settings);
  return LatticeElement::trusted(std::move(rep), ctx.shape());
}

LatticeElement tau(const LatticeElement& l, int keep, const BipartiteContext& ctx, const Settings& settings) {
  require_total(l.hilbert_dim(), ctx, "tau");
  if (keep != 1 && keep != 2) throw std::invalid_argument("tau: keep must be 1 or 2");
  const SpaceShape target = ctx.factor_shape(keep);
  if (l.is_bottom()) return LatticeElement::bottom(target);
  std::vector<HermOp> traces;
  for (int i = 0; i < l.rep().dim(); ++i) traces.push_back(partial_trace(l.rep().basis_op(i), ctx.shape(), keep));
  return LatticeElement::closure_of(span(traces, settings.tol), target, settings);
}

double ppt_min_eigenvalue(const DensityOp& rho, const BipartiteContext& ctx) {
  require_total(rho.dim(), ctx, "ppt_min_eigenvalue");
  return partial_transpose(rho.op(), ctx.shape()).min_eigenvalue();
}

bool ppt_is_exact(const BipartiteContext& ctx) { return ctx.n1() * ctx.n2() <= 6; }

double reconstruction_error(const ProductDecomposition& d, const DensityOp& rho) {
  CMatrix s = CMatrix::Zero(rho.dim(), rho.dim());
  for (size_t k = 0; k < d.weights.size(); ++k) s += d.weights[k] * tensor(d.first[k].op(), d.second[k].op()).matrix();
  return (s - rho.matrix()).norm();
}

namespace {

// Levenberg-Marquardt on rho ≈ sum_k w_k w_k^dagger with w_k = u_k ⊗ v_k.
// Each u_k carries the weight in its norm. Only meaningful for pure
// product atoms of unrestricted factors.
ProductDecomposition polish_pure_products(const DensityOp& rho, const ProductDecomposition& start, int n1, int n2) {
  const size_t terms = start.weights.size();
  const int n = n1 * n2;
  const Eigen::Index params = static_cast<Eigen::Index>(terms) * 2 * (n1 + n2);
  std::vector<CVector> u(terms), v(terms);
  for (size_t k = 0; k < terms; ++k) {
    Eigen::SelfAdjointEigenSolver<CMatrix> ea(start.first[k].matrix()), eb(start.second[k].matrix());
    u[k] = std::sqrt(start.weights[k]) * ea.eigenvectors().col(n1 - 1);
    v[k] = eb.eigenvectors().col(n2 - 1);
  }
  auto model = [&](const std::vector<CVector>& uu, const std::vector<CVector>& vv) {
    CMatrix m = CMatrix::Zero(n, n);
    for (size_t k = 0; k < terms; ++k) {
      CVector w = Eigen::kroneckerProduct(uu[k], vv[k]);
      m += w * w.adjoint();
    }
    return m;
  };
  auto residual_of = [&](const CMatrix& m) { return to_coords(HermOp::unchecked(m - rho.matrix())); };

  RVector f = residual_of(model(u, v));
  double cost = f.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < 300 && cost > 1e-30; ++it) {
    RMatrix jac(n * n, params);
    Eigen::Index col = 0;
    for (size_t k = 0; k < terms; ++k) {
      CVector w = Eigen::kroneckerProduct(u[k], v[k]);
      auto push = [&](const CVector& dw) {
        CMatrix d = dw * w.adjoint();
        jac.col(col++) = to_coords(HermOp::unchecked(d + d.adjoint()));
      };
      for (int i = 0; i < n1; ++i)
        for (cplx unit : {cplx(1, 0), cplx(0, 1)}) {
          CVector du = CVector::Zero(n1);
          du(i) = unit;
          push(Eigen::kroneckerProduct(du, v[k]));
        }
      for (int i = 0; i < n2; ++i)
        for (cplx unit : {cplx(1, 0), cplx(0, 1)}) {
          CVector dv = CVector::Zero(n2);
          dv(i) = unit;
          push(Eigen::kroneckerProduct(u[k], dv));
        }
    }
    RMatrix jtj = jac.transpose() * jac;
    RVector g = jac.transpose() * f;
    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      RMatrix sys = jtj;
      sys.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
      RVector step = -sys.ldlt().solve(g);
      std::vector<CVector> u2 = u, v2 = v;
      Eigen::Index c = 0;
      for (size_t k = 0; k < terms; ++k) {
        for (int i = 0; i < n1; ++i, c += 2) u2[k](i) += cplx(step(c), step(c + 1));
        for (int i = 0; i < n2; ++i, c += 2) v2[k](i) += cplx(step(c), step(c + 1));
      }
      RVector f2 = residual_of(model(u2, v2));
      if (f2.squaredNorm() < cost) {
        u = std::move(u2);
        v = std::move(v2);
        f = std::move(f2);
        cost = f.squaredNorm();
        lambda = std::max(lambda * 0.3, 1e-15);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }

  ProductDecomposition out;
  out.rounds = start.rounds;
  for (size_t k = 0; k < terms; ++k) {
    const double nu = u[k].norm(), nv = v[k].norm();
    if (nu * nv == 0.0) continue;
    out.weights.push_back(nu * nu * nv * nv);
    out.first.push_back(DensityOp::pure(u[k] / nu));
    out.second.push_back(DensityOp::pure(v[k] / nv));
  }
  out.residual = reconstruction_error(out, rho);
  return out;
}

}  // namespace

ProductDecomposition decompose_products(const DensityOp& rho, const StateBody& body_a, const StateBody& body_b,
                                        const DecompositionOptions& opts, const Settings& settings) {
  const int n1 = body_a.n, n2 = body_b.n;
  if (rho.dim() != n1 * n2) throw DimensionError("decompose_products: dimension mismatch");
  Rng rng(opts.seed);
  SideSampler sa(body_a, rng), sb(body_b, rng);
  const bool full = body_a.is_full() && body_b.is_full();

  Pool pool(n1, n2);
  for (const auto& x : sa.fixed())
    for (const auto& y : sb.fixed()) pool.add(x, y);
  if (full) {
    // eigenbases of the marginals settle product inputs in one solve
    auto ea = eigen_states(partial_trace(rho.op(), SpaceShape::bipartite(n1, n2), 1));
    auto eb = eigen_states(partial_trace(rho.op(), SpaceShape::bipartite(n1, n2), 2));
    for (const auto& x : ea)
      for (const auto& y : eb) pool.add(x, y);
  }
  for (int i = 0; i < opts.dictionary; ++i) pool.add(sa.draw(), sb.draw());

  // Alternating maximization of <m, x ⊗ y> from a starting y.
  struct Response {
    DensityOp x, y;
    double value = -std::numeric_limits<double>::infinity();
  };
  auto alternate = [&](const CMatrix& m, DensityOp y, int iters) {
    Response out;
    out.y = std::move(y);
    for (int it = 0; it < iters; ++it) {
      DensityOp x = linear_maximize(body_a, herm_part(contract_second(m, out.y.matrix(), n1, n2)), settings);
      HermOp my = herm_part(contract_first(m, x.matrix(), n1, n2));
      DensityOp yn = linear_maximize(body_b, my, settings);
      double v = hs_inner(my, yn.op());
      bool stalled = v <= out.value + 1e-15 * (1.0 + std::abs(v));
      if (v >= out.value) {
        out.x = std::move(x);
        out.y = std::move(yn);
        out.value = v;
      }
      if (stalled) break;
    }
    return out;
  };

  // A rank-deficient rho only decomposes over products inside its range;
  // seed the pool with such products and penalize leaving the range.
  CMatrix off_range = CMatrix::Zero(rho.dim(), rho.dim());
  {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
    const double cut = settings.tol.rank * std::max(1.0, es.eigenvalues().maxCoeff());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) <= cut) off_range += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  const bool deficient = off_range.norm() > 0.5;
  if (deficient) {
    const CMatrix in_range = CMatrix::Identity(rho.dim(), rho.dim()) - off_range;
    const int seeds = full ? 60 : 15;
    for (int k = 0; k < seeds; ++k) {
      Response resp = alternate(in_range, sb.draw(), full ? 400 : 60);
      if (resp.value >= 1.0 - 1e-8) pool.add(resp.x, resp.y);
    }
  }

  const RVector target = to_coords(rho.op());
  ProductDecomposition best;
  best.residual = std::numeric_limits<double>::infinity();
  int since_improved = 0;
  const int alternations = full ? 25 : 6;
  const int starts = full ? 3 : 1;

  for (int round = 0; round <= opts.max_rounds; ++round) {
    auto sol = detail::nnls(pool.matrix(), target);
    std::vector<bool> active(pool.size());
    ProductDecomposition cur;
    cur.rounds = round;
    CMatrix sigma = CMatrix::Zero(rho.dim(), rho.dim());
    for (size_t i = 0; i < pool.size(); ++i) {
      active[i] = sol.x(static_cast<Eigen::Index>(i)) > 0.0;
      if (!active[i]) continue;
      cur.weights.push_back(sol.x(static_cast<Eigen::Index>(i)));
      cur.first.push_back(pool[i].x);
      cur.second.push_back(pool[i].y);
      sigma += cur.weights.back() * from_coords(rho.dim(), pool[i].coords).matrix();
    }
    cur.residual = reconstruction_error(cur, rho);
    if (cur.residual < 0.999 * best.residual) {
      since_improved = 0;
    } else {
      ++since_improved;
    }
    if (cur.residual < best.residual) best = cur;
    if (best.residual <= opts.target || since_improved > 60 || round == opts.max_rounds) break;

    pool.keep(active);
    const CMatrix r = rho.matrix() - sigma;
    const CMatrix objective = deficient ? CMatrix(r - (1.0 + 10.0 * r.norm()) * off_range) : r;
    double bestval = 0.0;
    std::optional<std::pair<DensityOp, DensityOp>> pick;
    for (int s = 0; s < starts; ++s) {
      DensityOp y0 = (s == 0 && !cur.second.empty())
                         ? cur.second[static_cast<size_t>(std::max_element(cur.weights.begin(), cur.weights.end()) -
                                                          cur.weights.begin())]
                         : sb.draw();
      Response resp = alternate(objective, std::move(y0), alternations);
      pool.add(resp.x, resp.y);
      if (resp.value > bestval) {
        bestval = resp.value;
        pick = std::make_pair(resp.x, resp.y);
      }
    }
    if (!pick) break;  // no product improves the fit
    // a few perturbed copies help NNLS bracket the target
    for (int k = 0; k < 2; ++k) pool.add(sa.draw(), pick->second);
  }
  if (full && best.residual > opts.target && !best.weights.empty()) {
    // Vanishing terms make the fit degenerate; also try the leading terms alone.
    const ProductDecomposition base = best;
    std::vector<size_t> order(base.weights.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return base.weights[a] > base.weights[b]; });
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    int rank = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > settings.tol.rank) ++rank;
    for (size_t keep : {static_cast<size_t>(rank), static_cast<size_t>(rank + 1), static_cast<size_t>(rank + 2), order.size()}) {
      if (keep == 0 || keep > order.size()) continue;
      ProductDecomposition trial;
      trial.rounds = base.rounds;
      double mass = 0.0;
      for (size_t i = 0; i < keep; ++i) mass += base.weights[order[i]];
      for (size_t i = 0; i < keep; ++i) {
        trial.weights.push_back(base.weights[order[i]] / mass);
        trial.first.push_back(base.first[order[i]]);
        trial.second.push_back(base.second[order[i]]);
      }
      ProductDecomposition polished = polish_pure_products(rho, trial, n1, n2);
      if (polished.residual < best.residual) best = std::move(polished);
      if (best.residual <= opts.target) break;
    }
  }
  return best;
}

std::string to_string(SepStatus s) {
  switch (s) {
    case SepStatus::separable: return "separable";
    case SepStatus::entangled: return "entangled";
    case SepStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::member: return "member";
    case MembershipStatus::outside: return "outside";
    case MembershipStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

constexpr double kDecompositionAccept = 1e-7;

DecompositionOptions options_for(const Settings& settings) {
  DecompositionOptions o;
  o.max_rounds = std::clamp(settings.budget / 10, 20, 2000);
  return o;
}

}  // namespace

SeparabilityVerdict is_separable(const DensityOp& rho, const BipartiteContext& ctx, const Settings& settings) {
  require_total(rho.dim(), ctx, "is_separable");
  SeparabilityVerdict v;
  v.ppt_eigenvalue = ppt_min_eigenvalue(rho, ctx);
  if (v.ppt_eigenvalue < -settings.tol.psd) {
    v.status = SepStatus::entangled;
    v.reason = "partial transpose has eigenvalue " + std::to_string(v.ppt_eigenvalue);
    return v;
  }
  StateBody a = state_body(HermSubspace::full(ctx.n1()), settings);
  StateBody b = state_body(HermSubspace::full(ctx.n2()), settings);
  ProductDecomposition d = decompose_products(rho, a, b, options_for(settings), settings);
  const bool found = d.residual <= kDecompositionAccept;
  v.decomposition = std::move(d);
  if (found) {
    v.status = SepStatus::separable;
    v.reason = "product decomposition found";
  } else if (ppt_is_exact(ctx)) {
    v.status = SepStatus::separable;
    v.reason = "positive partial transpose (exact in this dimension); decomposition residual " +
               std::to_string(v.decomposition->residual);
  } else {
    v.status = SepStatus::inconclusive;
    v.reason = "positive partial transpose; no decomposition found (residual " +
               std::to_string(v.decomposition->residual) + ")";
  }
  return v;
}

MembershipResult convex_tensor_membership(const DensityOp& rho, const LatticeElement& a, const LatticeElement& b,
                                          const BipartiteContext& ctx, const Settings& settings) {
  require_total(rho.dim(), ctx, "convex_tensor_membership");
  require_factor(a, ctx, 1, "convex_tensor_membership");
  require_factor(b, ctx, 2, "convex_tensor_membership");
  MembershipResult out;
  if (a.is_bottom() || b.is_bottom()) {
    out.status = MembershipStatus::outside;
    out.reason = "a factor element is empty";
    return out;
  }
  if (!contains(psi(a, b, ctx, settings).rep(), rho.op(), settings.tol)) {
    out.status = MembershipStatus::outside;
    out.reason = "not in the span of products of the two elements";
    return out;
  }
  double ppt = ppt_min_eigenvalue(rho, ctx);
  if (ppt < -settings.tol.psd) {
    out.status = MembershipStatus::outside;
    out.reason = "entangled: partial transpose eigenvalue " + std::to_string(ppt);
    return out;
  }
  StateBody ba = state_body(a.rep(), settings);
  StateBody bb = state_body(b.rep(), settings);
  ProductDecomposition d = decompose_products(rho, ba, bb, options_for(settings), settings);
  if (d.residual <= kDecompositionAccept) {
    out.status = MembershipStatus::member;
    out.reason = "decomposition found";
  } else {
    out.status = MembershipStatus::inconclusive;
    out.reason = "no decomposition found (residual " + std::to_string(d.residual) + ")";
  }
  out.decomposition = std::move(d);
  return out;
}

// ---- reports -------------------------------------------------------------

PsiSlotReport psi_fixed_slot_report(const std::vector<LatticeElement>& sample, const LatticeElement& fixed,
                                    const BipartiteContext& ctx, const Settings& settings) {
  require_factor(fixed, ctx, 2, "psi_fixed_slot_report");
  const Tolerances& tol = settings.tol;
  PsiSlotReport r;
  r.elements = static_cast<int>(sample.size());
  std::vector<LatticeElement> images;
  for (const auto& a : sample) images.push_back(psi(a, fixed, ctx, settings));

  for (size_t i = 0; i < sample.size(); ++i) {
    for (size_t j = i; j < sample.size(); ++j) {
      const auto& a = sample[i];
      const auto& b = sample[j];
      if (!equal(psi(meet(a, b, settings), fixed, ctx, settings), meet(images[i], images[j], settings), tol))
        ++r.meet_failures;
      if (!equal(psi(join(a, b, settings), fixed, ctx, settings), join(images[i], images[j], settings), tol))
        ++r.join_failures;
      if (equal(images[i], images[j], tol) != equal(a, b, tol)) ++r.injectivity_failures;
    }
  }

  std::optional<DensityOp> other;  // a state of factor 2 outside the fixed atom
  if (is_atom(fixed)) {
    DensityOp mm = DensityOp::maximally_mixed(ctx.n2());
    other = contains(fixed.rep(), mm.op(), tol) ? DensityOp::pure(CVector::Unit(ctx.n2(), 0)) : mm;
  }
  for (size_t i = 0; i < sample.size(); ++i) {
    LatticeElement na = neg(sample[i], settings);
    LatticeElement lhs = psi(na, fixed, ctx, settings);
    LatticeElement rhs = neg(images[i], settings);
    if (!leq(lhs, rhs, tol)) {
      ++r.neg_below_failures;
      continue;
    }
    if (!leq(rhs, lhs, tol)) ++r.neg_strict;
    if (other && !na.is_bottom() && !r.product_witness) {
      auto fp = feasible_point(na.rep(), settings);
      if (fp.witness) {
        LatticeElement w = atom(tensor(*fp.witness, *other), ctx.shape());
        r.product_witness = leq(w, rhs, tol) && !leq(w, lhs, tol);
      }
    }
  }
  return r;
}

TauReport tau_morphism_report(const std::vector<std::pair<LatticeElement, LatticeElement>>& pairs,
                              const BipartiteContext& ctx, std::uint64_t seed, const Settings& settings) {
  const Tolerances& tol = settings.tol;
  TauReport r;
  r.pairs = static_cast<int>(pairs.size());
  for (const auto& [a, b] : pairs) {
    LatticeElement ab_join = join(a, b, settings);
    LatticeElement ab_meet = meet(a, b, settings);
    for (int i = 1; i <= 2; ++i) {
      LatticeElement ta = tau(a, i, ctx, settings), tb = tau(b, i, ctx, settings);
      if (!equal(tau(ab_join, i, ctx, settings), join(ta, tb, settings), tol)) ++r.join_failures;
      if (!leq(tau(ab_meet, i, ctx, settings), meet(ta, tb, settings), tol)) ++r.meet_below_failures;
    }
  }

  Rng rng(seed);
  DensityOp rho1 = random_density(ctx.n1(), ctx.n1(), rng);
  DensityOp rho2 = random_density(ctx.n2(), ctx.n2(), rng);
  DensityOp rho2b = random_density(ctx.n2(), ctx.n2(), rng);
  {
    LatticeElement x = atom(tensor(rho1, rho2), ctx.shape());
    LatticeElement y = atom(tensor(rho1, rho2b), ctx.shape());
    LatticeElement down_of_meet = tau(meet(x, y, settings), 1, ctx, settings);
    LatticeElement meet_of_down = meet(tau(x, 1, ctx, settings), tau(y, 1, ctx, settings), settings);
    r.meet_counterexample_strict = down_of_meet.is_bottom() &&
                                   equal(meet_of_down, atom(rho1), tol);
  }

  const int trials = std::max<int>(10, static_cast<int>(pairs.size()));
  LatticeElement at1 = atom(rho1), at2 = atom(rho2), at2b = atom(rho2b);
  for (int t = 0; t < trials; ++t) {
    std::uniform_int_distribution<int> k1(1, ctx.n1() * ctx.n1()), k2(1, ctx.n2() * ctx.n2());
    LatticeElement l1 = random_element(ctx.n1(), k1(rng), rng);
    LatticeElement l2 = random_element(ctx.n2(), k2(rng), rng);
    r.surjectivity_trials += 2;
    LatticeElement up1 = psi(l1, at2, ctx, settings);
    if (!equal(tau(up1, 1, ctx, settings), l1, tol)) ++r.surjectivity_failures;
    if (!equal(tau(psi(at1, l2, ctx, settings), 2, ctx, settings), l2, tol)) ++r.surjectivity_failures;
    if (!r.non_injective_witness) {
      LatticeElement up1b = psi(l1, at2b, ctx, settings);
      r.non_injective_witness = !equal(up1, up1b, tol) && equal(tau(up1b, 1, ctx, settings), l1, tol) &&
                                equal(tau(up1, 1, ctx, settings), l1, tol);
    }
  }
  return r;
}

namespace {

bool has_equal(const std::vector<LatticeElement>& set, const LatticeElement& x, const Tolerances& tol) {
  for (const auto& e : set)
    if (e.rep().dim() == x.rep().dim() && equal(e, x, tol)) return true;
  return false;
}

}  // namespace

SublatticeResult generate_sublattice(const std::vector<LatticeElement>& seeds, int cap, const Settings& settings) {
  SublatticeResult out;
  for (const auto& s : seeds) {
    if (!out.elements.empty() && !(s.shape() == out.elements.front().shape()))
      throw DimensionError("generate_sublattice: seeds have different shapes");
    if (!has_equal(out.elements, s, settings.tol)) out.elements.push_back(s);
  }
  // pairs (i, j) with j < done are already combined
  size_t done = 0;
  while (done < out.elements.size()) {
    const size_t j = done;
    for (size_t i = 0; i <= j; ++i) {
      for (const LatticeElement& c : {meet(out.elements[i], out.elements[j], settings),
                                       join(out.elements[i], out.elements[j], settings)}) {
        if (has_equal(out.elements, c, settings.tol)) continue;
        if (static_cast<int>(out.elements.size()) >= cap) {
          out.truncated = true;
          return out;
        }
        out.elements.push_back(c);
      }
    }
    ++done;
  }
  return out;
}

bool is_closed_under_meet_join(const std::vector<LatticeElement>& elements, const Settings& settings) {
  for (size_t i = 0; i < elements.size(); ++i)
    for (size_t j = i + 1; j < elements.size(); ++j) {
      if (!has_equal(elements, meet(elements[i], elements[j], settings), settings.tol)) return false;
      if (!has_equal(elements, join(elements[i], elements[j], settings), settings.tol)) return false;
    }
  return true;
}

ImPsiReport im_psi_separability_report(const std::vector<std::pair<LatticeElement, LatticeElement>>& pairs,
                                       const BipartiteContext& ctx, std::uint64_t seed, const Settings& settings) {
  const Tolerances& tol = settings.tol;
  ImPsiReport r;
  r.pairs = static_cast<int>(pairs.size());
  Rng rng(seed);
  DensityOp bell = bell_state(ctx);
  LatticeElement bell_atom = atom(bell, ctx.shape());
  r.bell_atom_has_no_separable = is_atom(bell_atom) && ppt_min_eigenvalue(bell, ctx) < -tol.psd;

  for (const auto& [a, b] : pairs) {
    require_factor(a, ctx, 1, "im_psi_separability_report");
    require_factor(b, ctx, 2, "im_psi_separability_report");
    LatticeElement p = psi(a, b, ctx, settings);
    auto fa = feasible_point(a.rep(), settings);
    auto fb = feasible_point(b.rep(), settings);
    if (!fa.witness || !fb.witness) {
      ++r.product_in_image_failures;
      continue;
    }
    DensityOp prod = tensor(*fa.witness, *fb.witness);
    if (!contains(p.rep(), prod.op(), tol) || is_separable(prod, ctx, settings).status != SepStatus::separable)
      ++r.product_in_image_failures;

    // the image is spanned by products of states of the two factors
    StateBody ba = state_body(a.rep(), settings), bb = state_body(b.rep(), settings);
    auto xs = sample_body(ba, a.rep().dim() + 3, rng);
    auto ys = sample_body(bb, b.rep().dim() + 3, rng);
    xs.push_back(DensityOp(ba.center));
    ys.push_back(DensityOp(bb.center));
    std::vector<HermOp> prods;
    for (const auto& x : xs)
      for (const auto& y : ys) prods.push_back(tensor(x.op(), y.op()));
    if (!contains(span(prods, tol), p.rep(), tol)) ++r.product_span_failures;

    if (equal(p, bell_atom, tol)) ++r.bell_equals_image;
    if (leq(bell_atom, p, tol)) ++r.bell_below_image;
  }

  const int trials = std::max<int>(10, static_cast<int>(pairs.size()));
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (int t = 0; t < trials; ++t) {
    std::vector<DensityOp> s1, s2;
    std::vector<HermOp> g1, g2;
    for (int i = 0; i < 3; ++i) {
      s1.push_back(random_density(ctx.n1(), 1 + static_cast<int>(rng() % ctx.n1()), rng));
      s2.push_back(random_density(ctx.n2(), 1 + static_cast<int>(rng() % ctx.n2()), rng));
      g1.push_back(s1.back().op());
      g2.push_back(s2.back().op());
    }
    CMatrix m = CMatrix::Zero(ctx.total(), ctx.total());
    double total = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double w = unif(rng);
        total += w;
        m += w * tensor(s1[static_cast<size_t>(i)].op(), s2[static_cast<size_t>(j)].op()).matrix();
      }
    DensityOp rho(HermOp::unchecked(m / total));
    LatticeElement l1 = LatticeElement::trusted(span(g1, tol), ctx.factor_shape(1));
    LatticeElement l2 = LatticeElement::trusted(span(g2, tol), ctx.factor_shape(2));
    ++r.separable_trials;
    if (!contains(psi(l1, l2, ctx, settings).rep(), rho.op(), tol)) ++r.separable_failures;
  }
  return r;
}

DensityOp bell_state(const BipartiteContext& ctx) {
  const int m = std::min(ctx.n1(), ctx.n2());
  CVector v = CVector::Zero(ctx.total());
  for (int i = 0; i < m; ++i) v(i * ctx.n2() + i) = 1.0;
  return DensityOp::pure(v / std::sqrt(static_cast<double>(m)));
}

DensityOp werner_state(double w) {
  BipartiteContext ctx(2, 2);
  HermOp h = bell_state(ctx).op() * w + HermOp::identity(4) * ((1.0 - w) / 4.0);
  return DensityOp(h);
}

}  // namespace qlattice
