#pragma once

// Reference computations for the unit tests. Each one is written directly
// from the definition, with loops over indices or exhaustive enumeration,
// and shares no code with the library routines it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "qlattice/herm.hpp"

namespace oracle {

using qlattice::CMatrix;
using qlattice::CVector;
using qlattice::RMatrix;
using qlattice::RVector;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// keep = 1 sums over the second index, keep = 2 over the first.
inline CMatrix partial_trace(const CMatrix& m, int n1, int n2, int keep) {
  const int d = keep == 1 ? n1 : n2;
  CMatrix out = CMatrix::Zero(d, d);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n2; ++l) {
          if (keep == 1 && j == l) out(i, k) += m(i * n2 + j, k * n2 + l);
          if (keep == 2 && i == k) out(j, l) += m(i * n2 + j, k * n2 + l);
        }
  return out;
}

inline CMatrix partial_transpose(const CMatrix& m, int n1, int n2) {
  CMatrix out(m.rows(), m.cols());
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n2; ++l) out(i * n2 + j, k * n2 + l) = m(i * n2 + l, k * n2 + j);
  return out;
}

// Real vector of all entries (real parts then imaginary parts).
inline RVector flatten(const CMatrix& m) {
  RVector v(2 * m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    v(i) = m.data()[i].real();
    v(m.size() + i) = m.data()[i].imag();
  }
  return v;
}

// Real dimension of the span of the given matrices.
inline int real_rank(const std::vector<CMatrix>& ms, double tol = 1e-8) {
  if (ms.empty()) return 0;
  RMatrix a(2 * ms[0].size(), static_cast<Eigen::Index>(ms.size()));
  for (size_t i = 0; i < ms.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = flatten(ms[i]);
  Eigen::JacobiSVD<RMatrix> svd(a);
  const RVector& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) ++r;
  return r;
}

// Whether x lies in the real span of ms.
inline bool in_real_span(const std::vector<CMatrix>& ms, const CMatrix& x, double tol = 1e-7) {
  std::vector<CMatrix> with = ms;
  with.push_back(x);
  return real_rank(with, tol) == real_rank(ms, tol);
}

// Orthogonal projector onto the column span, by SVD.
inline CMatrix projector_onto(const CMatrix& cols, double tol = 1e-9) {
  const Eigen::Index n = cols.rows();
  if (cols.cols() == 0) return CMatrix::Zero(n, n);
  Eigen::JacobiSVD<CMatrix> svd(cols, Eigen::ComputeThinU);
  CMatrix p = CMatrix::Zero(n, n);
  const RVector& s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) p += svd.matrixU().col(i) * svd.matrixU().col(i).adjoint();
  return p;
}

// Projector onto range(P) ∩ range(Q): null space of the stacked (I-P), (I-Q).
inline CMatrix intersection_projector(const CMatrix& p, const CMatrix& q) {
  const Eigen::Index n = p.rows();
  CMatrix stacked(2 * n, n);
  stacked << CMatrix::Identity(n, n) - p, CMatrix::Identity(n, n) - q;
  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullV);
  CMatrix out = CMatrix::Zero(n, n);
  const RVector& s = svd.singularValues();
  for (Eigen::Index i = 0; i < n; ++i)
    if (i >= s.size() || s(i) < 1e-8) out += svd.matrixV().col(i) * svd.matrixV().col(i).adjoint();
  return out;
}

// Nonnegative least squares by enumerating every support set; the optimum
// is the unconstrained least-squares fit on some support whose solution is
// nonnegative. Exponential, for a handful of columns only.
inline RVector nnls_exhaustive(const RMatrix& a, const RVector& b) {
  const int m = static_cast<int>(a.cols());
  RVector best = RVector::Zero(m);
  double best_res = b.norm();
  for (int mask = 1; mask < (1 << m); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < m; ++j)
      if (mask & (1 << j)) idx.push_back(j);
    RMatrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    RVector z = sub.completeOrthogonalDecomposition().solve(b);
    if (z.minCoeff() < -1e-12) continue;
    const double res = (sub * z - b).norm();
    if (res < best_res - 1e-12) {
      best_res = res;
      best.setZero();
      for (size_t k = 0; k < idx.size(); ++k) best(idx[k]) = std::max(0.0, z(static_cast<Eigen::Index>(k)));
    }
  }
  return best;
}

// Smallest eigenvalue straight from the characteristic data of a Hermitian
// matrix (via a fresh solver instance; used for sanity only).
inline double min_eig(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace oracle
