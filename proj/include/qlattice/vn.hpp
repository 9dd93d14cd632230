#pragma once

// Projector lattice of a Hilbert space and its embedding as faces of the
// state space.

#include "qlattice/lattice.hpp"

namespace qlattice {

class VNElement {
 public:
  VNElement() = default;
  /// Validates P = P^2 = P^dagger within tol.proj and a {0,1} spectrum.
  explicit VNElement(const HermOp& projector, const Tolerances& tol = {});
  /// Projector onto the column span (QR, rank cut at tol.rank).
  static VNElement from_columns(const CMatrix& cols, const Tolerances& tol = {});
  static VNElement zero(int n);
  static VNElement identity(int n);

  const HermOp& projector() const { return p_; }
  int rank() const { return rank_; }
  int dim() const { return p_.dim(); }
  /// Orthonormal basis of the range.
  CMatrix range() const;

 private:
  HermOp p_;
  int rank_ = 0;
};

VNElement vn_meet(const VNElement& p, const VNElement& q, const Tolerances& tol = {});
VNElement vn_join(const VNElement& p, const VNElement& q, const Tolerances& tol = {});
VNElement vn_neg(const VNElement& p);
bool vn_leq(const VNElement& p, const VNElement& q, const Tolerances& tol = {});

/// The face {rho : range(rho) ⊆ range(p)} as a lattice element; its good
/// representative {X : X = pXp} is built directly.
LatticeElement face_embed(const VNElement& p);
LatticeElement face_embed(const VNElement& p, const SpaceShape& shape);

struct OpComparison {
  bool meet_preserved = false;       // embed(p ∧ q) = embed(p) ∧ embed(q)
  bool join_below = false;           // embed(p) ∨ embed(q) <= embed(p ∨ q)
  bool join_strict = false;
  bool neg_below = false;            // ¬embed(p) <= embed(¬p)
  bool neg_strict = false;
  bool nested = false;               // embed(p) <= embed(q)
  bool nested_joins_agree = true;    // when nested: both joins equal embed(q)
  int lattice_join_dim = 0;
  int face_join_dim = 0;
  bool all_hold() const { return meet_preserved && join_below && neg_below && nested_joins_agree; }
};

OpComparison compare_ops(const VNElement& p, const VNElement& q, const Settings& settings = {});

}  // namespace qlattice
