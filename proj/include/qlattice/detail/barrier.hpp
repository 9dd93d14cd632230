#pragma once

// Log-barrier path following for small linear matrix inequalities:
//
//   maximize  b . z   subject to  A(z) = A0 + sum_i z_i A_i  >  0
//
// The centering problem for a barrier weight mu is
//   maximize  b . z + mu * log det A(z),
// solved by damped Newton steps; mu is then shrunk geometrically. At a
// centered point, Z = mu * A(z)^{-1} is the dual estimate: it satisfies
// tr(Z A_i) = -b_i and the duality gap is mu * m.

#include <functional>
#include <vector>

#include "qlattice/herm.hpp"

namespace qlattice::detail {

struct LmiProblem {
  CMatrix base;               // A0, m x m Hermitian
  std::vector<CMatrix> dirs;  // A_i, Hermitian
  RVector objective;          // b, one entry per dir
};

struct BarrierOptions {
  double mu_start = 1.0;
  double mu_shrink = 0.2;
  double mu_final = 1e-11;
  int max_newton = 5000;
  double centering_tol = 1e-12;  // squared Newton decrement of f / mu
};

struct BarrierResult {
  RVector z;
  double mu = 0.0;
  CMatrix slack_inverse;  // A(z)^{-1}
  int newton_steps = 0;
  bool stopped_early = false;
  bool budget_exhausted = false;
};

/// Called after each centering stage; returning true stops the path.
using StagePredicate = std::function<bool(const RVector& z, double mu)>;

/// z0 must be strictly feasible (A(z0) positive definite).
BarrierResult maximize_with_barrier(const LmiProblem& problem, RVector z0, const BarrierOptions& opts,
                                    const StagePredicate& stop = {});

CMatrix lmi_value(const LmiProblem& problem, const RVector& z);

}  // namespace qlattice::detail
