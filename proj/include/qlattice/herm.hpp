#pragma once

// Hermitian-operator algebra on finite-dimensional Hilbert spaces.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qlattice {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Numerical tolerances threaded through every operation.
struct Tolerances {
  double herm = 1e-10;        // max |A - A^dagger| entry
  double trace = 1e-10;       // |tr(rho) - 1|
  double psd = 1e-9;          // allowed negative eigenvalue
  double pure = 1e-8;         // HS norm of rho^2 - rho
  double rank = 1e-9;         // singular-value cutoff, relative to the largest
  double inclusion = 1e-7;    // projection residual for membership / inclusion
  double proj = 1e-9;         // idempotence of projectors
  double interior = 1e-7;     // compressed lambda_min needed to call a point interior
  double infeasible = 1e-6;   // lambda_min below -infeasible means empty
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidOperator : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hilbert-space factor structure: {n} for a simple system, {n1, n2} for a
/// bipartite one.
struct SpaceShape {
  std::vector<int> factors;

  SpaceShape() = default;
  explicit SpaceShape(std::vector<int> f);
  static SpaceShape simple(int n) { return SpaceShape({n}); }
  static SpaceShape bipartite(int n1, int n2) { return SpaceShape({n1, n2}); }

  int total() const;
  bool is_bipartite() const { return factors.size() == 2; }
  std::string to_string() const;  // "3" or "2x3"
  static SpaceShape parse(const std::string& text);

  friend bool operator==(const SpaceShape&, const SpaceShape&) = default;
};

/// An n x n complex Hermitian matrix; an element of the real vector space of
/// Hermitian operators.
class HermOp {
 public:
  HermOp() = default;

  /// Validates hermiticity within tol.herm and symmetrizes the stored entries.
  explicit HermOp(const CMatrix& m, const Tolerances& tol = {});

  static HermOp zero(int n);
  static HermOp identity(int n);
  /// |v><v| (v is not normalized here).
  static HermOp outer(const CVector& v);
  /// Wraps an already-Hermitian matrix without checking; symmetrizes.
  static HermOp unchecked(const CMatrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double hs_norm() const { return m_.norm(); }

  /// Ascending eigenvalues.
  RVector eigenvalues() const;
  double min_eigenvalue() const;

  HermOp operator+(const HermOp& o) const;
  HermOp operator-(const HermOp& o) const;
  HermOp operator*(double s) const;
  friend HermOp operator*(double s, const HermOp& a) { return a * s; }
  HermOp& operator+=(const HermOp& o);

 private:
  CMatrix m_;
};

/// A positive semidefinite Hermitian operator with unit trace.
class DensityOp {
 public:
  DensityOp() = default;
  /// Throws InvalidOperator unless is_density(op, tol).
  explicit DensityOp(HermOp op, const Tolerances& tol = {});

  /// Normalizes v and returns |v><v|.
  static DensityOp pure(const CVector& v);
  static DensityOp maximally_mixed(int n);

  const HermOp& op() const { return op_; }
  int dim() const { return op_.dim(); }
  const CMatrix& matrix() const { return op_.matrix(); }

 private:
  HermOp op_;
};

/// tr(a b).
double hs_inner(const HermOp& a, const HermOp& b);
bool is_density(const HermOp& a, const Tolerances& tol = {});
bool is_pure(const DensityOp& rho, const Tolerances& tol = {});
double expectation(const DensityOp& rho, const HermOp& m);

/// Kronecker product; the left operand acts on the first factor.
HermOp tensor(const HermOp& a, const HermOp& b);
DensityOp tensor(const DensityOp& a, const DensityOp& b);

/// Reduced operator on factor `keep` (1 = left, 2 = right) of a bipartite
/// shape; the other factor is traced out.
HermOp partial_trace(const HermOp& rho, const SpaceShape& shape, int keep);
DensityOp partial_trace(const DensityOp& rho, const SpaceShape& shape, int keep);

/// Transpose of the second factor.
HermOp partial_transpose(const HermOp& rho, const SpaceShape& shape);

/// HS-orthonormal basis of n x n Hermitians: I/sqrt(n) followed by the
/// generalized Gell-Mann matrices (symmetric, antisymmetric, diagonal),
/// each scaled to unit HS norm.
std::vector<HermOp> herm_basis(int n);

/// Real coefficients of a in herm_basis(a.dim()).
RVector expand(const HermOp& a, const std::vector<HermOp>& basis);
HermOp reconstruct(const RVector& coeffs, const std::vector<HermOp>& basis);

// Isometric real coordinates used by the subspace machinery:
// diagonal entries, then sqrt(2) Re and sqrt(2) Im of each upper entry.
// <to_coords(a), to_coords(b)> = hs_inner(a, b).
RVector to_coords(const HermOp& a);
HermOp from_coords(int n, const Eigen::Ref<const RVector>& x);

/// Orthonormal eigenvectors of a with eigenvalue above cutoff (its support).
CMatrix support_columns(const HermOp& a, double cutoff);

}  // namespace qlattice
