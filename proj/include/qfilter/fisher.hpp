#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qfilter/model.hpp"
#include "qfilter/record.hpp"

namespace qfilter {

// Likelihood tangents rho^i = d_i(unnormalized rho)/trace(unnormalized
// rho); trace(rho^i) is the score d_i log L.
struct TangentState {
  std::vector<CMat> mats;

  std::vector<double> scores() const;
};

struct FisherMatrix {
  int n = 0;
  std::vector<double> info;     // n x n, row-major, symmetric
  std::vector<double> std_err;  // matching Monte Carlo standard errors
  int n_traj = 0;

  double operator()(int i, int j) const { return info[static_cast<std::size_t>(i) * n + j]; }
  double se(int i, int j) const { return std_err[static_cast<std::size_t>(i) * n + j]; }
};

struct ScoreOptions {
  std::optional<DensityMatrix> initial;
};

// Final conditioned state and tangents after replaying a record with
// tangent propagation; scores() of the tangent equal the gradient of
// the record log-likelihood at theta.
std::pair<DensityMatrix, TangentState> propagate_tangent(
    const ParametricModel& model, const ParameterVector& theta,
    const Record& record, const ScoreOptions& opts = {});

// Gradient of the record log-likelihood: trace(rho^i_T) for all i.
// Returns an empty optional for an impossible record.
std::optional<std::vector<double>> loglik_gradient(const ParametricModel& model,
                                                   const ParameterVector& theta,
                                                   const Record& record,
                                                   const ScoreOptions& opts = {});

// Monte Carlo Fisher information: simulates n_traj records at theta and
// averages the score outer products.  Trajectories use substreams of
// seed and are accumulated in index order, so the result is
// reproducible for fixed (seed, n_traj) regardless of scheduling.
FisherMatrix estimate_fisher(const ParametricModel& model,
                             const ParameterVector& theta, double T, double dt,
                             int n_traj, std::uint64_t seed, Measurement kind,
                             const ScoreOptions& opts = {});

}  // namespace qfilter
