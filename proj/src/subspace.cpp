#include "qlattice/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qlattice {

namespace {

void require_same_ambient(const HermSubspace& s, const HermSubspace& t, const char* what) {
  if (s.ambient_dim() != t.ambient_dim()) {
    throw DimensionError(std::string(what) + ": ambient dimension mismatch (" +
                         std::to_string(s.ambient_dim()) + " vs " + std::to_string(t.ambient_dim()) + ")");
  }
}

// Left singular vectors of m with sigma > cutoff * sigma_max.
RMatrix range_basis(const RMatrix& m, double rel_cutoff) {
  if (m.cols() == 0 || m.rows() == 0) return RMatrix(m.rows(), 0);
  if (m.cols() > m.rows()) {
    // wide: range(m) = range(R^T) for m^T = QR, with the same singular values
    Eigen::HouseholderQR<RMatrix> qr(m.transpose());
    RMatrix rt = qr.matrixQR().topRows(m.rows()).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
    return range_basis(rt, rel_cutoff);
  }
  Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeThinU);
  const RVector& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  if (smax <= 1e-300) return RMatrix(m.rows(), 0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > rel_cutoff * smax) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

HermSubspace HermSubspace::zero(int n) {
  if (n < 1) throw DimensionError("subspace ambient dimension must be positive");
  HermSubspace s;
  s.n_ = n;
  s.q_ = RMatrix(n * n, 0);
  return s;
}

HermSubspace HermSubspace::full(int n) {
  if (n < 1) throw DimensionError("subspace ambient dimension must be positive");
  HermSubspace s;
  s.n_ = n;
  s.q_ = RMatrix::Identity(n * n, n * n);
  return s;
}

HermSubspace HermSubspace::from_orthonormal(int n, RMatrix columns) {
  if (columns.rows() != n * n) throw DimensionError("subspace coordinates have wrong length");
  if (columns.cols() > 0) {
    RMatrix gram = columns.transpose() * columns;
    double dev = (gram - RMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (dev > 1e-10) throw InvalidOperator("subspace basis is not orthonormal");
  }
  HermSubspace s;
  s.n_ = n;
  s.q_ = std::move(columns);
  return s;
}

HermOp HermSubspace::basis_op(int i) const { return from_coords(n_, q_.col(i)); }

std::vector<HermOp> HermSubspace::basis() const {
  std::vector<HermOp> out;
  out.reserve(static_cast<size_t>(dim()));
  for (int i = 0; i < dim(); ++i) out.push_back(basis_op(i));
  return out;
}

HermOp HermSubspace::project(const HermOp& a) const {
  if (a.dim() != n_) throw DimensionError("project: dimension mismatch");
  RVector x = to_coords(a);
  RVector p = q_ * (q_.transpose() * x);
  return from_coords(n_, p);
}

HermSubspace span_coords(int n, const RMatrix& columns, const Tolerances& tol) {
  if (n < 1 || columns.rows() != n * n) throw DimensionError("span: coordinate length mismatch");
  return HermSubspace::from_orthonormal(n, range_basis(columns, tol.rank));
}

HermSubspace span(std::span<const HermOp> generators, const Tolerances& tol) {
  if (generators.empty()) throw DimensionError("span of no generators needs an explicit dimension");
  const int n = generators.front().dim();
  RMatrix cols(n * n, static_cast<Eigen::Index>(generators.size()));
  for (size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].dim() != n) throw DimensionError("span: generators of mixed dimension");
    cols.col(static_cast<Eigen::Index>(i)) = to_coords(generators[i]);
  }
  return span_coords(n, cols, tol);
}

HermSubspace span(std::initializer_list<HermOp> generators, const Tolerances& tol) {
  return span(std::span<const HermOp>(generators.begin(), generators.size()), tol);
}

HermSubspace intersect(const HermSubspace& s, const HermSubspace& t, const Tolerances& tol) {
  require_same_ambient(s, t, "intersect");
  const int n = s.ambient_dim();
  if (s.is_zero() || t.is_zero()) return HermSubspace::zero(n);
  // Work inside s: x = Qs c lies in t iff (I - Pt) Qs c = 0.
  const RMatrix& qs = s.coords();
  const RMatrix& qt = t.coords();
  RMatrix resid = qs - qt * (qt.transpose() * qs);
  Eigen::JacobiSVD<RMatrix> svd(resid, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  // sv(i) is the sine of the i-th principal angle; columns of V beyond the
  // numerical rank of resid span the common directions.
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > tol.rank) ++r;
  RMatrix common = qs * svd.matrixV().rightCols(qs.cols() - r);
  // re-orthonormalize against rounding
  return HermSubspace::from_orthonormal(n, range_basis(common, 1e-8));
}

HermSubspace sum(const HermSubspace& s, const HermSubspace& t, const Tolerances& tol) {
  require_same_ambient(s, t, "sum");
  const int n = s.ambient_dim();
  RMatrix cols(n * n, s.dim() + t.dim());
  cols << s.coords(), t.coords();
  return span_coords(n, cols, tol);
}

HermSubspace orth_complement(const HermSubspace& s) {
  const int n = s.ambient_dim();
  const int big = n * n;
  if (s.is_zero()) return HermSubspace::full(n);
  if (s.dim() == big) return HermSubspace::zero(n);
  Eigen::HouseholderQR<RMatrix> qr(s.coords());
  RMatrix q = qr.householderQ() * RMatrix::Identity(big, big);
  return HermSubspace::from_orthonormal(n, q.rightCols(big - s.dim()));
}

bool contains(const HermSubspace& s, const HermOp& x, const Tolerances& tol) {
  if (x.dim() != s.ambient_dim()) throw DimensionError("contains: dimension mismatch");
  RVector v = to_coords(x);
  double nv = v.norm();
  if (nv == 0.0) return true;
  RVector r = v - s.coords() * (s.coords().transpose() * v);
  return r.norm() <= tol.inclusion * nv;
}

bool contains(const HermSubspace& s, const HermSubspace& t, const Tolerances& tol) {
  require_same_ambient(s, t, "contains");
  if (t.is_zero()) return true;
  if (t.dim() > s.dim()) return false;
  RMatrix r = t.coords() - s.coords() * (s.coords().transpose() * t.coords());
  return r.colwise().norm().maxCoeff() <= tol.inclusion;
}

bool subspace_equal(const HermSubspace& s, const HermSubspace& t, const Tolerances& tol) {
  return s.dim() == t.dim() && contains(s, t, tol) && contains(t, s, tol);
}

double max_principal_angle(const HermSubspace& s, const HermSubspace& t) {
  require_same_ambient(s, t, "max_principal_angle");
  if (s.dim() != t.dim()) return std::numbers::pi / 2;
  if (s.is_zero()) return 0.0;
  RMatrix r = t.coords() - s.coords() * (s.coords().transpose() * t.coords());
  Eigen::JacobiSVD<RMatrix> svd(r);
  double sine = std::min(1.0, svd.singularValues()(0));
  return std::asin(sine);
}

}  // namespace qlattice
