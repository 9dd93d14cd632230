#include "qlattice/random.hpp"

#include <cmath>

namespace qlattice {

std::uint64_t mix64(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CVector gaussian_vector(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CVector v(n);
  for (int i = 0; i < n; ++i) {
    double re = g(rng);
    double im = g(rng);
    v(i) = cplx(re, im);
  }
  return v;
}

CMatrix ginibre(int rows, int cols, Rng& rng) {
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) m.col(j) = gaussian_vector(rows, rng);
  return m;
}

CVector haar_state(int n, Rng& rng) {
  CVector v = gaussian_vector(n, rng);
  return v / v.norm();
}

DensityOp random_density(int n, int rank, Rng& rng) {
  if (n < 1 || rank < 1 || rank > n) throw DimensionError("random_density: need 1 <= rank <= n");
  CMatrix g = ginibre(n, rank, rng);
  CMatrix w = g * g.adjoint();
  return DensityOp(HermOp::unchecked(w / w.trace().real()));
}

DensityOp random_density(int n, int rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(n, rank, rng);
}

LatticeElement random_element(const SpaceShape& shape, int k, Rng& rng) {
  const int n = shape.total();
  if (k < 1 || k > n * n) throw DimensionError("random_element: need 1 <= k <= n^2");
  std::uniform_int_distribution<int> rank(1, n);
  std::vector<HermOp> gens;
  gens.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) gens.push_back(random_density(n, rank(rng), rng).op());
  return LatticeElement::trusted(span(gens), shape);
}

LatticeElement random_element(int n, int k, Rng& rng) { return random_element(SpaceShape::simple(n), k, rng); }

LatticeElement random_element(int n, int k, std::uint64_t seed) {
  Rng rng(seed);
  return random_element(n, k, rng);
}

VNElement random_projector(int n, int rank, Rng& rng) {
  if (rank < 0 || rank > n) throw DimensionError("random_projector: rank out of range");
  if (rank == 0) return VNElement::zero(n);
  return VNElement::from_columns(ginibre(n, rank, rng));
}

}  // namespace qlattice
