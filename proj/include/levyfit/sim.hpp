#pragma once

#include <cstdint>
#include <vector>

#include "levyfit/model.hpp"

namespace levyfit {

struct SimOutput {
  Dataset dataset;
  RowMatrix noise_increments;  // n x r, the exact draws fed to the recursion
  std::uint64_t seed = 0;
};

/// Parameter values for simulation: theta in (gamma, alpha) order plus eta.
struct TrueParams {
  Vector gamma;
  Vector alpha;
  Vector eta;
};

/// Euler recursion X_j = X_{j-1} + a h + c dJ_j. A law override replaces the
/// model's law (e.g. empirical resampling); its parameters are then eta.
SimOutput euler_simulate(const SdeModel& model, const TrueParams& params, const SamplingScheme& scheme,
                         const Vector& x0, std::uint64_t seed, const LawPtr& law_override = nullptr);

/// Seed of replicate `index` under `master_seed`.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t index);

/// Independent replicates; output order and content do not depend on threads.
std::vector<SimOutput> simulate_batch(const SdeModel& model, const TrueParams& params, const SamplingScheme& scheme,
                                      const Vector& x0, std::uint64_t master_seed, std::size_t reps,
                                      unsigned threads = 0);

/// Noise sidecar CSV: j,t_j,dJ_1..dJ_r.
std::string noise_to_csv(const SimOutput& sim);

}  // namespace levyfit
