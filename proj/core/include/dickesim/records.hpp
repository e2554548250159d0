#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dickesim/common.hpp"

namespace dicke {

// Sampled observables of one trajectory on a fixed time grid. Series not
// recorded for a run stay empty (size 0), never NaN-filled.
struct TrajectoryRecord {
  RealVector sample_times;
  RealVector jx, jy, jz;
  RealVector entropy_half;    // half-partition entanglement entropy
  RealVector fisher_density;  // f_Q = F_Q / N (optional, expensive)
  std::vector<double> jump_times;  // quantum-jump unraveling only
  std::uint64_t seed = 0;          // RNG stream the trajectory used
  std::string config_fingerprint;
};

// Homodyne current of one diffusive trajectory. increments/step_times hold
// the per-step record only when requested; sampled_di is the increment of
// the step starting at each sample time (so one entry fewer than the
// sample grid). integrated is the plain sum of all per-step increments.
struct HomodyneRecord {
  RealVector sample_times;
  RealVector sampled_di;
  RealVector step_times;
  RealVector increments;
  double integrated = 0.0;
};

}  // namespace dicke
