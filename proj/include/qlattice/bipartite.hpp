#pragma once

// Two-factor systems: the going-up map psi, the partial-trace maps tau,
// separability and membership in the convex tensor product of two elements.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlattice/lattice.hpp"

namespace qlattice {

class BipartiteContext {
 public:
  BipartiteContext(int n1, int n2);
  explicit BipartiteContext(const SpaceShape& shape);

  const SpaceShape& shape() const { return shape_; }
  int n1() const { return shape_.factors[0]; }
  int n2() const { return shape_.factors[1]; }
  int total() const { return shape_.total(); }
  SpaceShape factor_shape(int i) const { return SpaceShape::simple(i == 1 ? n1() : n2()); }

 private:
  SpaceShape shape_;
};

/// Good representative spanned by {x ⊗ y}; a over factor 1, b over factor 2.
LatticeElement psi(const LatticeElement& a, const LatticeElement& b, const BipartiteContext& ctx,
                   const Settings& settings = {});

/// Element of the `keep` factor: closure of the partial traces over the other factor.
LatticeElement tau(const LatticeElement& l, int keep, const BipartiteContext& ctx, const Settings& settings = {});

double ppt_min_eigenvalue(const DensityOp& rho, const BipartiteContext& ctx);
/// Dimensions where a positive partial transpose implies separability.
bool ppt_is_exact(const BipartiteContext& ctx);

struct ProductDecomposition {
  std::vector<double> weights;
  std::vector<DensityOp> first;
  std::vector<DensityOp> second;
  double residual = 0.0;  // HS norm of rho - sum_k w_k first_k ⊗ second_k
  int rounds = 0;
};

/// Recomputes the residual from scratch.
double reconstruction_error(const ProductDecomposition& d, const DensityOp& rho);

struct DecompositionOptions {
  int dictionary = 500;        // random product atoms in the initial pool
  int max_rounds = 400;        // column-generation rounds
  double target = 1e-9;        // stop once the residual is below this
  std::uint64_t seed = 0x5eedULL;
};

/// Column generation: nonnegative least squares over a pool of product
/// states x ⊗ y with x in body_a and y in body_b, enlarged each round by an
/// alternating best response to the current residual. Returns the best
/// decomposition found, whatever its residual.
ProductDecomposition decompose_products(const DensityOp& rho, const StateBody& body_a, const StateBody& body_b,
                                        const DecompositionOptions& opts, const Settings& settings = {});

enum class SepStatus { separable, entangled, inconclusive };
std::string to_string(SepStatus s);

struct SeparabilityVerdict {
  SepStatus status = SepStatus::inconclusive;
  std::optional<ProductDecomposition> decomposition;
  double ppt_eigenvalue = 0.0;
  std::string reason;
};

/// Settings::budget caps the decomposition rounds.
SeparabilityVerdict is_separable(const DensityOp& rho, const BipartiteContext& ctx, const Settings& settings = {});

enum class MembershipStatus { member, outside, inconclusive };
std::string to_string(MembershipStatus s);

struct MembershipResult {
  MembershipStatus status = MembershipStatus::inconclusive;
  std::optional<ProductDecomposition> decomposition;
  std::string reason;
};

/// Is rho a convex combination of products x ⊗ y with x a state of a and y a
/// state of b? "outside" is returned only with a certificate: rho outside
/// psi(a, b), an empty factor, or a negative partial transpose.
MembershipResult convex_tensor_membership(const DensityOp& rho, const LatticeElement& a, const LatticeElement& b,
                                          const BipartiteContext& ctx, const Settings& settings = {});

// ---- reports -------------------------------------------------------------

struct PsiSlotReport {
  int elements = 0;
  int meet_failures = 0;
  int join_failures = 0;
  int injectivity_failures = 0;  // equality of images disagrees with equality of arguments
  int neg_below_failures = 0;    // psi(¬a, U) <= ¬psi(a, U) violated
  int neg_strict = 0;            // elements where that inclusion is strict
  bool product_witness = false;  // explicit rho1 ⊗ rho2' in the gap (fixed slot an atom)
  bool all_hold() const {
    return meet_failures == 0 && join_failures == 0 && injectivity_failures == 0 && neg_below_failures == 0 &&
           neg_strict > 0;
  }
};

/// Elements of factor 1 against a fixed element of factor 2.
PsiSlotReport psi_fixed_slot_report(const std::vector<LatticeElement>& sample, const LatticeElement& fixed,
                                    const BipartiteContext& ctx, const Settings& settings = {});

struct TauReport {
  int pairs = 0;
  int join_failures = 0;         // tau_i(a ∨ b) = tau_i(a) ∨ tau_i(b)
  int meet_below_failures = 0;   // tau_i(a ∧ b) <= tau_i(a) ∧ tau_i(b)
  bool meet_counterexample_strict = false;
  int surjectivity_trials = 0;
  int surjectivity_failures = 0;
  bool non_injective_witness = false;
  bool all_hold() const {
    return join_failures == 0 && meet_below_failures == 0 && meet_counterexample_strict && surjectivity_failures == 0 &&
           non_injective_witness;
  }
};

TauReport tau_morphism_report(const std::vector<std::pair<LatticeElement, LatticeElement>>& pairs,
                              const BipartiteContext& ctx, std::uint64_t seed, const Settings& settings = {});

struct SublatticeResult {
  std::vector<LatticeElement> elements;
  bool truncated = false;
};

/// Closure of the seeds under meet and join, deduplicated by mutual leq.
SublatticeResult generate_sublattice(const std::vector<LatticeElement>& seeds, int cap, const Settings& settings = {});

/// Whether every pairwise meet and join of the set is already in it.
bool is_closed_under_meet_join(const std::vector<LatticeElement>& elements, const Settings& settings = {});

struct ImPsiReport {
  int pairs = 0;
  int product_in_image_failures = 0;   // feasible rho1 ⊗ rho2 in psi(a, b) and separable
  int product_span_failures = 0;       // basis of psi(a, b) inside span of products
  int separable_trials = 0;
  int separable_failures = 0;          // separable rho inside psi(span rho^1, span rho^2)
  int bell_equals_image = 0;           // sampled psi(a, b) equal to the Bell atom
  int bell_below_image = 0;            // sampled psi(a, b) containing the Bell state
  bool bell_atom_has_no_separable = false;
  bool all_hold() const {
    return product_in_image_failures == 0 && product_span_failures == 0 && separable_failures == 0 &&
           bell_equals_image == 0 && bell_atom_has_no_separable;
  }
};

ImPsiReport im_psi_separability_report(const std::vector<std::pair<LatticeElement, LatticeElement>>& pairs,
                                       const BipartiteContext& ctx, std::uint64_t seed, const Settings& settings = {});

/// Maximally entangled pure state sum_i |ii> / sqrt(min(n1, n2)).
DensityOp bell_state(const BipartiteContext& ctx);
/// w |Φ+><Φ+| + (1 - w) I/4 on 2 ⊗ 2.
DensityOp werner_state(double w);

}  // namespace qlattice
