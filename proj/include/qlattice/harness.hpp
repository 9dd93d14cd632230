#pragma once

// Property-suite runner, trial scheduling, the improper-mixture
// demonstration and the separable-volume estimator.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlattice/bipartite.hpp"

namespace qlattice::harness {

using json = nlohmann::json;

enum class Execution { serial, parallel };

/// Runs body(i) for every i in [0, count). Parallel mode spreads trials over
/// OpenMP threads; each trial must only write its own slot of any shared
/// output. An exception from any trial is rethrown (lowest index first) once
/// all trials have finished.
void for_each_trial(int count, const std::function<void(int)>& body, Execution mode);

struct SuiteConfig {
  std::string suite;
  SpaceShape shape;        // no factors: the suite's default dimensions
  int trials = 0;          // 0: the suite's default count
  std::uint64_t seed = 1;
  Settings settings;
  Execution execution = Execution::parallel;
};

struct PropertyResult {
  std::string name;
  bool pass = true;
  int checked = 0;
  int failed = 0;
  std::string detail;
  json counterexamples = json::array();  // first few failing trials, replayable
};

struct Report {
  std::string suite;
  SuiteConfig config;
  std::vector<PropertyResult> properties;
  double seconds = 0.0;

  bool pass() const;
  json to_json() const;
  std::string to_text() const;
};

const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite or unsupported dimensions.
Report run_suite(const SuiteConfig& cfg);

struct ImproperMixtureCase {
  DensityOp state;              // pure state of the whole
  DensityOp reduced;            // partial trace onto factor 1
  int vn_conjunction_rank = 0;  // rank of the smallest projector with tr(reduced P) = 1
  bool lattice_atom = false;    // atom(reduced) is one-dimensional
  bool atom_is_meet = false;    // and equals the meet of sampled elements containing it
  int rejections = 0;
};

/// entangled = true samples Haar states until the reduced state is mixed;
/// false uses a product of Haar states as the control case.
ImproperMixtureCase improper_mixture_demo(int n1, int n2, std::uint64_t seed, bool entangled = true,
                                          const Settings& settings = {});
json to_json(const ImproperMixtureCase& c);

struct VolumeEstimate {
  int samples = 0;
  int separable = 0;
  double fraction = 0.0;
  double ci_halfwidth = 0.0;  // normal-approximation 95% half-width
  bool exact = true;          // false: PPT fraction outside the exact dimensions
};

/// Hilbert-Schmidt ensemble (full-rank Ginibre) classified by the partial
/// transpose, which decides separability exactly when n1 * n2 <= 6.
VolumeEstimate separable_volume(const SpaceShape& shape, int samples, std::uint64_t seed,
                                Execution mode = Execution::parallel, const Settings& settings = {});
json to_json(const VolumeEstimate& v);

}  // namespace qlattice::harness
