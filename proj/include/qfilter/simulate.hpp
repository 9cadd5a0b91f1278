#pragma once

#include <cstdint>
#include <optional>

#include "qfilter/model.hpp"
#include "qfilter/record.hpp"

namespace qfilter {

struct SimOptions {
  // Times at which to store the conditioned state (snapped to the grid).
  std::vector<double> state_times;
  // Replaces the model's initial state when set.
  std::optional<DensityMatrix> initial;
};

// Photon-counting record from the nonlinear jump filter.  Per step the
// click indicator is 1 with probability trace(c†c rho) dt.
SimOutput simulate_jump(const ParametricModel& model, const ParameterVector& theta,
                        double T, double dt, std::uint64_t seed,
                        const SimOptions& opts = {});

// Homodyne record by Euler-Maruyama integration of the diffusion filter;
// dy = trace(c rho + rho c†) dt + dW with dW ~ Normal(0, dt).
SimOutput simulate_diffusion(const ParametricModel& model,
                             const ParameterVector& theta, double T, double dt,
                             std::uint64_t seed, const SimOptions& opts = {});

// Ground truth for the bimodal model: the configuration jumps are
// sampled explicitly as a classical Markov chain and the two-level
// atomic state evolves under the current configuration's operators.
// hidden_path records the sampled configuration; the record contains
// only the photon clicks.
SimOutput simulate_bimodal_truth(const BimodalModel& model,
                                 const ParameterVector& theta, double T, double dt,
                                 std::uint64_t seed, const SimOptions& opts = {});

}  // namespace qfilter
