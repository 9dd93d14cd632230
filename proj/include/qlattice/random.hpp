#pragma once

// Deterministic instance generators. Every generator takes an explicit seed;
// per-trial seeds come from mix64(root, trial) so results never depend on
// scheduling.

#include <cstdint>
#include <random>

#include "qlattice/lattice.hpp"
#include "qlattice/vn.hpp"

namespace qlattice {

/// SplitMix64 finalizer applied to root + golden-ratio * (index + 1).
std::uint64_t mix64(std::uint64_t root, std::uint64_t index);

using Rng = std::mt19937_64;

/// Standard complex Gaussian vector / matrix entries (E|z|^2 = 1).
CVector gaussian_vector(int n, Rng& rng);
CMatrix ginibre(int rows, int cols, Rng& rng);

CVector haar_state(int n, Rng& rng);

/// G G^dagger / tr(G G^dagger), G an n x rank Ginibre matrix.
DensityOp random_density(int n, int rank, Rng& rng);
DensityOp random_density(int n, int rank, std::uint64_t seed);

/// Span of k independent random densities with ranks drawn from 1..n.
/// Good by construction.
LatticeElement random_element(int n, int k, Rng& rng);
LatticeElement random_element(int n, int k, std::uint64_t seed);
LatticeElement random_element(const SpaceShape& shape, int k, Rng& rng);

/// Projector onto the span of `rank` Haar-random vectors.
VNElement random_projector(int n, int rank, Rng& rng);

}  // namespace qlattice
