#pragma once

#include <doctest.h>

#include "oracles.hpp"
#include "qlattice/bipartite.hpp"
#include "qlattice/random.hpp"
#include "qlattice/vn.hpp"

namespace fixtures {

using namespace qlattice;

inline CMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline HermOp I2() { return HermOp::identity(2); }
inline HermOp sx() { return HermOp(mat2(0, 1, 1, 0)); }
inline HermOp sy() { return HermOp(mat2(0, cplx(0, -1), cplx(0, 1), 0)); }
inline HermOp sz() { return HermOp(mat2(1, 0, 0, -1)); }
inline HermOp diag2(double a, double b) { return HermOp(mat2(a, 0, 0, b)); }
inline DensityOp ket(int n, int i) { return DensityOp::pure(CVector::Unit(n, i)); }

inline LatticeElement elem(std::initializer_list<HermOp> gens, int n = 2) {
  return LatticeElement::closure_of(span(gens), SpaceShape::simple(n));
}

}  // namespace fixtures
