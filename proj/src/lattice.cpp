#include "qlattice/lattice.hpp"

#include <atomic>

namespace qlattice {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_verify_joins{false};
#else
std::atomic<bool> g_verify_joins{true};
#endif

void require_same_shape(const LatticeElement& a, const LatticeElement& b, const char* what) {
  if (!(a.shape() == b.shape())) {
    throw DimensionError(std::string(what) + ": shape mismatch (" + a.shape().to_string() + " vs " +
                         b.shape().to_string() + ")");
  }
}

void require_shape_fits(const HermSubspace& s, const SpaceShape& shape) {
  if (shape.total() != s.ambient_dim()) {
    throw DimensionError("shape " + shape.to_string() + " does not match Hilbert dimension " +
                         std::to_string(s.ambient_dim()));
  }
}

}  // namespace

void set_verify_joins(bool on) { g_verify_joins = on; }
bool verify_joins() { return g_verify_joins; }

LatticeElement LatticeElement::closure_of(const HermSubspace& s, const SpaceShape& shape, const Settings& settings) {
  require_shape_fits(s, shape);
  return LatticeElement(good_representative(s, settings), shape);
}

LatticeElement LatticeElement::from_good(const HermSubspace& rep, const SpaceShape& shape, const Settings& settings) {
  require_shape_fits(rep, shape);
  HermSubspace g = good_representative(rep, settings);
  if (!subspace_equal(g, rep, settings.tol)) {
    throw InvalidOperator("subspace is not a good representative (closure has dimension " + std::to_string(g.dim()) +
                          ", input " + std::to_string(rep.dim()) + ")");
  }
  return LatticeElement(rep, shape);
}

LatticeElement LatticeElement::trusted(HermSubspace rep, SpaceShape shape) {
  require_shape_fits(rep, shape);
  return LatticeElement(std::move(rep), std::move(shape));
}

LatticeElement LatticeElement::bottom(const SpaceShape& shape) {
  return LatticeElement(HermSubspace::zero(shape.total()), shape);
}

LatticeElement LatticeElement::top(const SpaceShape& shape) {
  return LatticeElement(HermSubspace::full(shape.total()), shape);
}

LatticeElement atom(const DensityOp& rho, const SpaceShape& shape) {
  return LatticeElement::trusted(span({rho.op()}), shape);
}

LatticeElement atom(const DensityOp& rho) { return atom(rho, SpaceShape::simple(rho.dim())); }

LatticeElement meet(const LatticeElement& a, const LatticeElement& b, const Settings& settings) {
  require_same_shape(a, b, "meet");
  if (a.is_bottom() || b.is_bottom()) return LatticeElement::bottom(a.shape());
  if (a.is_top()) return b;
  if (b.is_top()) return a;
  HermSubspace raw = intersect(a.rep(), b.rep(), settings.tol);
  return LatticeElement::closure_of(raw, a.shape(), settings);
}

LatticeElement join(const LatticeElement& a, const LatticeElement& b, const Settings& settings) {
  require_same_shape(a, b, "join");
  HermSubspace s = sum(a.rep(), b.rep(), settings.tol);
  if (verify_joins()) return LatticeElement::from_good(s, a.shape(), settings);
  return LatticeElement::trusted(std::move(s), a.shape());
}

LatticeElement neg(const LatticeElement& a, const Settings& settings) {
  return LatticeElement::closure_of(orth_complement(a.rep()), a.shape(), settings);
}

bool leq(const LatticeElement& a, const LatticeElement& b, const Tolerances& tol) {
  require_same_shape(a, b, "leq");
  return contains(b.rep(), a.rep(), tol);
}

bool equal(const LatticeElement& a, const LatticeElement& b, const Tolerances& tol) {
  return leq(a, b, tol) && leq(b, a, tol);
}

bool is_atom(const LatticeElement& a) { return a.rep().dim() == 1; }

ModularReport check_modular(const LatticeElement& a, const LatticeElement& b, const LatticeElement& c,
                            const Settings& settings) {
  require_same_shape(a, b, "check_modular");
  require_same_shape(a, c, "check_modular");
  if (!leq(a, c, settings.tol)) throw std::invalid_argument("check_modular: requires a <= c");
  ModularReport r;
  r.lhs = join(a, meet(b, c, settings), settings);
  r.rhs = meet(join(a, b, settings), c, settings);
  r.holds = equal(r.lhs, r.rhs, settings.tol);
  return r;
}

}  // namespace qlattice
