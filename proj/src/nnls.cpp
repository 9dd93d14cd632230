#include "qlattice/detail/nnls.hpp"

#include <algorithm>
#include <vector>

namespace qlattice::detail {

namespace {

RVector solve_passive(const RMatrix& a, const RVector& b, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (size_t j = 0; j < passive.size(); ++j)
    if (passive[j]) cols.push_back(static_cast<Eigen::Index>(j));
  RVector z = RVector::Zero(a.cols());
  if (cols.empty()) return z;
  RMatrix sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
  RVector s = sub.colPivHouseholderQr().solve(b);
  for (size_t c = 0; c < cols.size(); ++c) z(cols[c]) = s(static_cast<Eigen::Index>(c));
  return z;
}

}  // namespace

NnlsResult nnls(const RMatrix& a, const RVector& b, int max_iter) {
  const Eigen::Index n = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n) + 50;
  NnlsResult res;
  res.x = RVector::Zero(n);
  std::vector<bool> passive(static_cast<size_t>(n), false);
  const double tol = 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()) * (1.0 + b.norm());

  while (res.iterations < max_iter) {
    RVector w = a.transpose() * (b - a * res.x);
    Eigen::Index best = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<size_t>(j)] && w(j) > wmax) {
        wmax = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<size_t>(best)] = true;
    ++res.iterations;

    while (true) {
      RVector z = solve_passive(a, b, passive);
      bool ok = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<size_t>(j)] && z(j) <= 0.0) ok = false;
      if (ok) {
        res.x = z;
        break;
      }
      // step toward z until the first passive coordinate hits zero
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<size_t>(j)] && z(j) <= 0.0) {
          double d = res.x(j) - z(j);
          if (d > 0.0) alpha = std::min(alpha, res.x(j) / d);
        }
      }
      res.x += alpha * (z - res.x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<size_t>(j)] && res.x(j) <= 1e-15) {
          passive[static_cast<size_t>(j)] = false;
          res.x(j) = 0.0;
        }
      }
    }
  }
  res.residual = (a * res.x - b).norm();
  return res;
}

}  // namespace qlattice::detail
