#include "qlattice/herm.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qlattice {

SpaceShape::SpaceShape(std::vector<int> f) : factors(std::move(f)) {
  if (factors.empty()) throw DimensionError("shape needs at least one factor");
  for (int d : factors) {
    if (d < 1) throw DimensionError("shape factors must be positive");
  }
}

int SpaceShape::total() const {
  return std::accumulate(factors.begin(), factors.end(), 1, std::multiplies<>());
}

std::string SpaceShape::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) os << 'x';
    os << factors[i];
  }
  return os.str();
}

SpaceShape SpaceShape::parse(const std::string& text) {
  if (text.empty() || text.back() == 'x') throw DimensionError("bad shape '" + text + "'");
  std::vector<int> f;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      size_t used = 0;
      int v = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      f.push_back(v);
    } catch (const std::exception&) {
      throw DimensionError("bad shape '" + text + "'");
    }
  }
  return SpaceShape(std::move(f));
}

// ---------------------------------------------------------------- HermOp

HermOp::HermOp(const CMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError("Hermitian operator must be square and non-empty");
  }
  double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol.herm) {
    throw InvalidOperator("matrix is not Hermitian (deviation " + std::to_string(dev) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermOp HermOp::unchecked(const CMatrix& m) {
  HermOp h;
  h.m_ = 0.5 * (m + m.adjoint());
  return h;
}

HermOp HermOp::zero(int n) { return unchecked(CMatrix::Zero(n, n)); }
HermOp HermOp::identity(int n) { return unchecked(CMatrix::Identity(n, n)); }
HermOp HermOp::outer(const CVector& v) { return unchecked(v * v.adjoint()); }

RVector HermOp::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double HermOp::min_eigenvalue() const { return eigenvalues()(0); }

HermOp HermOp::operator+(const HermOp& o) const {
  if (dim() != o.dim()) throw DimensionError("dimension mismatch in +");
  HermOp h;
  h.m_ = m_ + o.m_;
  return h;
}

HermOp HermOp::operator-(const HermOp& o) const {
  if (dim() != o.dim()) throw DimensionError("dimension mismatch in -");
  HermOp h;
  h.m_ = m_ - o.m_;
  return h;
}

HermOp HermOp::operator*(double s) const {
  HermOp h;
  h.m_ = m_ * s;
  return h;
}

HermOp& HermOp::operator+=(const HermOp& o) {
  if (dim() != o.dim()) throw DimensionError("dimension mismatch in +=");
  m_ += o.m_;
  return *this;
}

// ------------------------------------------------------------- DensityOp

DensityOp::DensityOp(HermOp op, const Tolerances& tol) : op_(std::move(op)) {
  if (!is_density(op_, tol)) throw InvalidOperator("operator is not a density operator");
}

DensityOp DensityOp::pure(const CVector& v) {
  double nrm = v.norm();
  if (nrm == 0.0) throw InvalidOperator("zero state vector");
  CVector u = v / nrm;
  return DensityOp(HermOp::outer(u));
}

DensityOp DensityOp::maximally_mixed(int n) {
  return DensityOp(HermOp::identity(n) * (1.0 / n));
}

// ------------------------------------------------------------ free functions

double hs_inner(const HermOp& a, const HermOp& b) {
  if (a.dim() != b.dim()) throw DimensionError("hs_inner: dimension mismatch");
  // tr(AB) = sum_ij A_ij conj(B_ij) for Hermitian B
  return (a.matrix().array() * b.matrix().array().conjugate()).sum().real();
}

bool is_density(const HermOp& a, const Tolerances& tol) {
  if (std::abs(a.trace() - 1.0) > tol.trace) return false;
  return a.min_eigenvalue() >= -tol.psd;
}

bool is_pure(const DensityOp& rho, const Tolerances& tol) {
  const CMatrix& m = rho.matrix();
  return (m * m - m).norm() <= tol.pure;
}

double expectation(const DensityOp& rho, const HermOp& m) {
  if (rho.dim() != m.dim()) throw DimensionError("expectation: dimension mismatch");
  return hs_inner(rho.op(), m);
}

HermOp tensor(const HermOp& a, const HermOp& b) {
  const int na = a.dim(), nb = b.dim();
  CMatrix out(na * nb, na * nb);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
    }
  }
  return HermOp::unchecked(out);
}

DensityOp tensor(const DensityOp& a, const DensityOp& b) {
  return DensityOp(tensor(a.op(), b.op()));
}

namespace {

void check_bipartite(const HermOp& rho, const SpaceShape& shape) {
  if (!shape.is_bipartite()) throw DimensionError("operation needs a bipartite shape");
  if (shape.total() != rho.dim()) {
    throw DimensionError("shape " + shape.to_string() + " does not match operator dimension " +
                         std::to_string(rho.dim()));
  }
}

}  // namespace

HermOp partial_trace(const HermOp& rho, const SpaceShape& shape, int keep) {
  check_bipartite(rho, shape);
  if (keep != 1 && keep != 2) throw DimensionError("keep index must be 1 or 2");
  const int n1 = shape.factors[0], n2 = shape.factors[1];
  const CMatrix& m = rho.matrix();
  if (keep == 1) {
    CMatrix out = CMatrix::Zero(n1, n1);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j)
        for (int k = 0; k < n2; ++k) out(i, j) += m(i * n2 + k, j * n2 + k);
    return HermOp::unchecked(out);
  }
  CMatrix out = CMatrix::Zero(n2, n2);
  for (int k = 0; k < n1; ++k) out += m.block(k * n2, k * n2, n2, n2);
  return HermOp::unchecked(out);
}

DensityOp partial_trace(const DensityOp& rho, const SpaceShape& shape, int keep) {
  return DensityOp(partial_trace(rho.op(), shape, keep));
}

HermOp partial_transpose(const HermOp& rho, const SpaceShape& shape) {
  check_bipartite(rho, shape);
  const int n1 = shape.factors[0], n2 = shape.factors[1];
  CMatrix out(rho.dim(), rho.dim());
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j)
      out.block(i * n2, j * n2, n2, n2) = rho.matrix().block(i * n2, j * n2, n2, n2).transpose();
  return HermOp::unchecked(out);
}

std::vector<HermOp> herm_basis(int n) {
  if (n < 1) throw DimensionError("herm_basis: n must be positive");
  std::vector<HermOp> basis;
  basis.reserve(static_cast<size_t>(n) * n);
  basis.push_back(HermOp::identity(n) * (1.0 / std::sqrt(double(n))));
  const double r2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      CMatrix s = CMatrix::Zero(n, n);
      s(j, k) = s(k, j) = r2;
      basis.push_back(HermOp::unchecked(s));
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      CMatrix a = CMatrix::Zero(n, n);
      a(j, k) = cplx(0, -r2);
      a(k, j) = cplx(0, r2);
      basis.push_back(HermOp::unchecked(a));
    }
  }
  // diagonal Gell-Mann: diag(1,..,1,-l,0,..) over l+1 leading entries
  for (int l = 1; l < n; ++l) {
    CMatrix d = CMatrix::Zero(n, n);
    double s = 1.0 / std::sqrt(double(l) * (l + 1));
    for (int i = 0; i < l; ++i) d(i, i) = s;
    d(l, l) = -l * s;
    basis.push_back(HermOp::unchecked(d));
  }
  return basis;
}

RVector expand(const HermOp& a, const std::vector<HermOp>& basis) {
  RVector c(static_cast<Eigen::Index>(basis.size()));
  for (size_t i = 0; i < basis.size(); ++i) c(static_cast<Eigen::Index>(i)) = hs_inner(a, basis[i]);
  return c;
}

HermOp reconstruct(const RVector& coeffs, const std::vector<HermOp>& basis) {
  if (basis.empty() || coeffs.size() != static_cast<Eigen::Index>(basis.size())) {
    throw DimensionError("reconstruct: coefficient count mismatch");
  }
  CMatrix m = CMatrix::Zero(basis[0].dim(), basis[0].dim());
  for (size_t i = 0; i < basis.size(); ++i) m += coeffs(static_cast<Eigen::Index>(i)) * basis[i].matrix();
  return HermOp::unchecked(m);
}

RVector to_coords(const HermOp& a) {
  const int n = a.dim();
  const double s2 = std::sqrt(2.0);
  RVector x(n * n);
  int p = 0;
  for (int i = 0; i < n; ++i) x(p++) = a.matrix()(i, i).real();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      x(p++) = s2 * a.matrix()(i, j).real();
      x(p++) = s2 * a.matrix()(i, j).imag();
    }
  }
  return x;
}

HermOp from_coords(int n, const Eigen::Ref<const RVector>& x) {
  if (x.size() != n * n) throw DimensionError("from_coords: coordinate length mismatch");
  const double r2 = 1.0 / std::sqrt(2.0);
  CMatrix m(n, n);
  int p = 0;
  for (int i = 0; i < n; ++i) m(i, i) = x(p++);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      cplx v(r2 * x(p), r2 * x(p + 1));
      p += 2;
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return HermOp::unchecked(m);
}

CMatrix support_columns(const HermOp& a, double cutoff) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  std::vector<int> keep;
  for (int i = 0; i < a.dim(); ++i)
    if (es.eigenvalues()(i) > cutoff) keep.push_back(i);
  CMatrix cols(a.dim(), static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  return cols;
}

}  // namespace qlattice
