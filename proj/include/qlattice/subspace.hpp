#pragma once

// Real-linear subspaces of the Euclidean space (Herm(n), tr).

#include <span>
#include <vector>

#include "qlattice/herm.hpp"

namespace qlattice {

/// A real subspace of n x n Hermitian operators, stored as HS-orthonormal
/// columns in the isometric coordinates of to_coords().
class HermSubspace {
 public:
  HermSubspace() = default;

  static HermSubspace zero(int n);
  static HermSubspace full(int n);
  /// Columns must already be orthonormal (checked to 1e-10).
  static HermSubspace from_orthonormal(int n, RMatrix columns);

  int ambient_dim() const { return n_; }
  int dim() const { return static_cast<int>(q_.cols()); }
  bool is_zero() const { return q_.cols() == 0; }
  int max_dim() const { return n_ * n_; }

  const RMatrix& coords() const { return q_; }
  HermOp basis_op(int i) const;
  std::vector<HermOp> basis() const;

  /// Orthogonal projection of a onto the subspace.
  HermOp project(const HermOp& a) const;

 private:
  int n_ = 0;
  RMatrix q_;  // n^2 x k
};

/// Orthonormalized span; rank by singular values > tol.rank * sigma_max.
HermSubspace span(std::span<const HermOp> generators, const Tolerances& tol = {});
HermSubspace span(std::initializer_list<HermOp> generators, const Tolerances& tol = {});
/// Span of coordinate columns (n^2 x g).
HermSubspace span_coords(int n, const RMatrix& columns, const Tolerances& tol = {});

HermSubspace intersect(const HermSubspace& s, const HermSubspace& t, const Tolerances& tol = {});
HermSubspace sum(const HermSubspace& s, const HermSubspace& t, const Tolerances& tol = {});
HermSubspace orth_complement(const HermSubspace& s);

bool contains(const HermSubspace& s, const HermOp& x, const Tolerances& tol = {});
bool contains(const HermSubspace& s, const HermSubspace& t, const Tolerances& tol = {});
/// Mutual inclusion.
bool subspace_equal(const HermSubspace& s, const HermSubspace& t, const Tolerances& tol = {});

/// Largest principal angle between s and t (pi/2 when dimensions differ).
double max_principal_angle(const HermSubspace& s, const HermSubspace& t);

}  // namespace qlattice
