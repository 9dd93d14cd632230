#pragma once

// The lattice of density-operator sets S ∩ C, each element held by its good
// representative (the unique subspace equal to the span of its states).

#include <string>

#include "qlattice/convex.hpp"

namespace qlattice {

class LatticeElement {
 public:
  LatticeElement() = default;

  /// Closure of an arbitrary subspace.
  static LatticeElement closure_of(const HermSubspace& s, const SpaceShape& shape, const Settings& settings = {});
  /// Accepts rep only if it is already a good representative; throws
  /// InvalidOperator otherwise.
  static LatticeElement from_good(const HermSubspace& rep, const SpaceShape& shape, const Settings& settings = {});
  /// No closure check. Callers must know rep is good.
  static LatticeElement trusted(HermSubspace rep, SpaceShape shape);

  static LatticeElement bottom(const SpaceShape& shape);
  static LatticeElement top(const SpaceShape& shape);

  const HermSubspace& rep() const { return rep_; }
  const SpaceShape& shape() const { return shape_; }
  int hilbert_dim() const { return rep_.ambient_dim(); }
  bool is_bottom() const { return rep_.is_zero(); }
  bool is_top() const { return rep_.dim() == rep_.max_dim(); }

 private:
  LatticeElement(HermSubspace rep, SpaceShape shape) : rep_(std::move(rep)), shape_(std::move(shape)) {}
  HermSubspace rep_;
  SpaceShape shape_;
};

LatticeElement atom(const DensityOp& rho, const SpaceShape& shape);
LatticeElement atom(const DensityOp& rho);

LatticeElement meet(const LatticeElement& a, const LatticeElement& b, const Settings& settings = {});
LatticeElement join(const LatticeElement& a, const LatticeElement& b, const Settings& settings = {});
LatticeElement neg(const LatticeElement& a, const Settings& settings = {});
bool leq(const LatticeElement& a, const LatticeElement& b, const Tolerances& tol = {});
/// Mutual leq.
bool equal(const LatticeElement& a, const LatticeElement& b, const Tolerances& tol = {});
bool is_atom(const LatticeElement& a);

/// Whether join re-verifies that the sum of good representatives is good.
/// On by default in builds without NDEBUG.
void set_verify_joins(bool on);
bool verify_joins();

struct ModularReport {
  bool holds = false;
  LatticeElement lhs;  // a ∨ (b ∧ c)
  LatticeElement rhs;  // (a ∨ b) ∧ c
};

/// Requires leq(a, c); throws std::invalid_argument otherwise.
ModularReport check_modular(const LatticeElement& a, const LatticeElement& b, const LatticeElement& c,
                            const Settings& settings = {});

}  // namespace qlattice
