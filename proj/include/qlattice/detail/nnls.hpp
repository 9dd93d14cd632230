#pragma once

#include "qlattice/herm.hpp"

namespace qlattice::detail {

struct NnlsResult {
  RVector x;
  double residual = 0.0;  // ||A x - b||
  int iterations = 0;
};

/// Lawson-Hanson active set method for min ||A x - b|| subject to x >= 0.
NnlsResult nnls(const RMatrix& a, const RVector& b, int max_iter = 0);

}  // namespace qlattice::detail
