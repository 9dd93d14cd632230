#pragma once

// Geometry of K = S ∩ C for a subspace S of Hermitian operators and the set
// C of density operators: feasibility, minimal supporting face and the
// good-representative closure span(S ∩ C).

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlattice/herm.hpp"
#include "qlattice/subspace.hpp"

namespace qlattice {

/// Tolerances plus the Newton-step budget of the inner barrier solver.
struct Settings {
  Tolerances tol;
  int budget = 5000;
};

/// Feasibility sits in the band (-tol.infeasible, -tol.psd): neither a point
/// nor emptiness could be certified. Raising the budget will not help when
/// the body is genuinely tangent at that scale.
class UndecidedFeasibility : public std::runtime_error {
 public:
  UndecidedFeasibility(double best, int round)
      : std::runtime_error("feasibility undecided (best lambda_min " + std::to_string(best) + ", round " +
                           std::to_string(round) + ")"),
        best_lambda_min(best),
        round(round) {}
  double best_lambda_min;
  int round;
};

class FaceReductionError : public std::runtime_error {
 public:
  FaceReductionError(const std::string& what, int round, double best)
      : std::runtime_error(what + " (round " + std::to_string(round) + ", best " + std::to_string(best) + ")"),
        round(round),
        best_value(best) {}
  int round;
  double best_value;
};

class OracleInconclusive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Feasibility { feasible, empty };

struct FeasibilityResult {
  Feasibility status = Feasibility::empty;
  std::optional<DensityOp> witness;
  double best_lambda_min = -std::numeric_limits<double>::infinity();
};

struct FaceCertificate {
  HermOp support;                        // projector P onto the minimal face's support
  std::vector<HermOp> reduction_steps;   // PSD operators orthogonal to S ∩ C
  DensityOp interior_point;              // positive definite on range(P)
};

/// Maximizes lambda_min over {rho in s : tr rho = 1}.
FeasibilityResult feasible_point(const HermSubspace& s, const Settings& settings = {});

/// Support of a maximum-rank element of s ∩ C by facial reduction.
/// Throws std::invalid_argument when s ∩ C is empty.
FaceCertificate minimal_face(const HermSubspace& s, const Settings& settings = {});

/// span(s ∩ C): the zero subspace when the intersection is empty.
HermSubspace good_representative(const HermSubspace& s, const Settings& settings = {});

/// Both the face certificate (when nonempty) and the closure, from one run.
struct ClosureResult {
  HermSubspace closure;
  std::optional<FaceCertificate> face;
};
ClosureResult close_subspace(const HermSubspace& s, const Settings& settings = {});

/// Relative interior parametrization of a nonempty good representative:
/// points are center + sum_j y_j directions[j], positive semidefinite
/// exactly when the compression onto `support` is.
struct StateBody {
  int n = 0;
  CMatrix support;                  // n x r orthonormal columns
  HermOp center;                    // density, positive definite on the support
  std::vector<HermOp> directions;   // traceless, HS-orthonormal, inside the representative
  bool is_full() const { return support.cols() == n && static_cast<int>(directions.size()) == n * n - 1; }
};
StateBody state_body(const HermSubspace& good_rep, const Settings& settings = {});

/// Approximate maximizer of tr(c X) over the body; the result is a density
/// inside the body. For the full state space this is the top eigenvector.
DensityOp linear_maximize(const StateBody& body, const HermOp& c, const Settings& settings = {});

/// Boundary points of the body along random chords through its center.
std::vector<DensityOp> sample_body(const StateBody& body, int count, std::mt19937_64& rng);

/// Independent sampling oracle for span(s ∩ C): points of the trace-one slice
/// accepted by an eigenvalue test, from a grid, uniform draws and chord
/// end points. Slice dimension must be at most 6.
struct OracleSample {
  std::vector<HermOp> points;
  HermSubspace span;
};
OracleSample brute_force_sample(const HermSubspace& s, int samples, std::uint64_t seed);
HermSubspace brute_force_span(const HermSubspace& s, int samples, std::uint64_t seed);

}  // namespace qlattice
