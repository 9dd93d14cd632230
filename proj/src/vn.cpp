#include "qlattice/vn.hpp"

#include <cmath>

namespace qlattice {

VNElement::VNElement(const HermOp& projector, const Tolerances& tol) : p_(projector) {
  const CMatrix& m = p_.matrix();
  if ((m * m - m).norm() > tol.proj * std::max(1.0, m.norm())) {
    throw InvalidOperator("operator is not idempotent");
  }
  RVector ev = p_.eigenvalues();
  int r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > 1e-8 && std::abs(ev(i) - 1.0) > 1e-8) throw InvalidOperator("projector spectrum not in {0,1}");
    if (ev(i) > 0.5) ++r;
  }
  rank_ = r;
}

VNElement VNElement::from_columns(const CMatrix& cols, const Tolerances& tol) {
  const Eigen::Index n = cols.rows();
  if (cols.cols() == 0) return zero(static_cast<int>(n));
  Eigen::ColPivHouseholderQR<CMatrix> qr(cols);
  qr.setThreshold(tol.rank);
  const Eigen::Index r = qr.rank();
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, r);
  VNElement e;
  e.p_ = HermOp::unchecked(q * q.adjoint());
  e.rank_ = static_cast<int>(r);
  return e;
}

VNElement VNElement::zero(int n) {
  VNElement e;
  e.p_ = HermOp::zero(n);
  return e;
}

VNElement VNElement::identity(int n) {
  VNElement e;
  e.p_ = HermOp::identity(n);
  e.rank_ = n;
  return e;
}

CMatrix VNElement::range() const { return support_columns(p_, 0.5); }

VNElement vn_meet(const VNElement& p, const VNElement& q, const Tolerances& tol) {
  if (p.dim() != q.dim()) throw DimensionError("vn_meet: dimension mismatch");
  const int n = p.dim();
  if (p.rank() == 0 || q.rank() == 0) return VNElement::zero(n);
  // x ∈ range(p) ∩ range(q)  iff  x = Vp c and (I - q) Vp c = 0
  CMatrix vp = p.range();
  CMatrix resid = (CMatrix::Identity(n, n) - q.projector().matrix()) * vp;
  Eigen::JacobiSVD<CMatrix> svd(resid, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > std::sqrt(tol.proj)) ++r;
  return VNElement::from_columns(vp * svd.matrixV().rightCols(vp.cols() - r), tol);
}

VNElement vn_join(const VNElement& p, const VNElement& q, const Tolerances& tol) {
  if (p.dim() != q.dim()) throw DimensionError("vn_join: dimension mismatch");
  CMatrix vp = p.range(), vq = q.range();
  CMatrix both(p.dim(), vp.cols() + vq.cols());
  both << vp, vq;
  return VNElement::from_columns(both, tol);
}

VNElement vn_neg(const VNElement& p) {
  return VNElement(HermOp::identity(p.dim()) - p.projector());
}

bool vn_leq(const VNElement& p, const VNElement& q, const Tolerances& tol) {
  if (p.dim() != q.dim()) throw DimensionError("vn_leq: dimension mismatch");
  CMatrix vp = p.range();
  return ((CMatrix::Identity(p.dim(), p.dim()) - q.projector().matrix()) * vp).norm() <= tol.inclusion;
}

LatticeElement face_embed(const VNElement& p, const SpaceShape& shape) {
  const int n = p.dim();
  if (shape.total() != n) throw DimensionError("face_embed: shape mismatch");
  if (p.rank() == 0) return LatticeElement::bottom(shape);
  if (p.rank() == n) return LatticeElement::top(shape);
  CMatrix v = p.range();
  RMatrix cols(n * n, p.rank() * p.rank());
  auto block = herm_basis(p.rank());
  for (size_t i = 0; i < block.size(); ++i) {
    cols.col(static_cast<Eigen::Index>(i)) = to_coords(HermOp::unchecked(v * block[i].matrix() * v.adjoint()));
  }
  // isometric image of an orthonormal basis: already orthonormal
  return LatticeElement::trusted(HermSubspace::from_orthonormal(n, cols), shape);
}

LatticeElement face_embed(const VNElement& p) { return face_embed(p, SpaceShape::simple(p.dim())); }

OpComparison compare_ops(const VNElement& p, const VNElement& q, const Settings& settings) {
  if (p.dim() != q.dim()) throw DimensionError("compare_ops: dimension mismatch");
  const Tolerances& tol = settings.tol;
  OpComparison r;
  LatticeElement fp = face_embed(p), fq = face_embed(q);

  r.meet_preserved = equal(face_embed(vn_meet(p, q, tol)), meet(fp, fq, settings), tol);

  LatticeElement ljoin = join(fp, fq, settings);
  LatticeElement fjoin = face_embed(vn_join(p, q, tol));
  r.lattice_join_dim = ljoin.rep().dim();
  r.face_join_dim = fjoin.rep().dim();
  r.join_below = leq(ljoin, fjoin, tol);
  r.join_strict = r.join_below && !leq(fjoin, ljoin, tol);

  LatticeElement lneg = neg(fp, settings);
  LatticeElement fneg = face_embed(vn_neg(p));
  r.neg_below = leq(lneg, fneg, tol);
  r.neg_strict = r.neg_below && !leq(fneg, lneg, tol);

  r.nested = leq(fp, fq, tol);
  if (r.nested) r.nested_joins_agree = equal(ljoin, fq, tol) && equal(fjoin, fq, tol);
  return r;
}

}  // namespace qlattice
