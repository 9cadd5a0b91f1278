#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "qfilter/model.hpp"
#include "qfilter/record.hpp"

namespace qfilter {

struct LikelihoodOptions {
  // Times at which (t, l_t, rho_t) snapshots are stored.
  std::vector<double> snapshot_times;
  std::optional<DensityMatrix> initial;
};

struct LikelihoodSnapshot {
  double t = 0.0;
  double loglik = 0.0;       // l_t relative to the reference measure
  double loglik_base = 0.0;  // theta-dependent part only (see below)
  DensityMatrix rho;
};

struct LikelihoodResult {
  // log L_T relative to the reference measure; -inf for a record that is
  // impossible under theta (a click at zero emission rate).
  double loglik = 0.0;
  // loglik minus the lambda-dependent offset lambda*dt*(n_steps - N)
  // - N*log(lambda), which depends only on the record.  Posterior code
  // uses this part so results are exactly invariant in lambda_ref.
  double loglik_base = 0.0;
  bool impossible = false;
  std::vector<LikelihoodSnapshot> trajectory;
};

// Replays a click record through the jump filter for candidate theta,
// accumulating dl = lambda dt + log(trace ratio) per no-click step and
// log(rate/lambda) at clicks.
LikelihoodResult loglik_jump(const ParametricModel& model,
                             const ParameterVector& theta, const JumpRecord& record,
                             double lambda_ref,
                             const LikelihoodOptions& opts = {});

// Replays a homodyne record through the diffusion filter driven by the
// recorded increments.
LikelihoodResult loglik_diffusion(const ParametricModel& model,
                                  const ParameterVector& theta,
                                  const DiffusionRecord& record,
                                  const LikelihoodOptions& opts = {});

LikelihoodResult loglik(const ParametricModel& model, const ParameterVector& theta,
                        const Record& record, double lambda_ref,
                        const LikelihoodOptions& opts = {});

// Monte Carlo estimate of the relative entropy S(p|p0) = E[l_T] between
// the click-record law under theta and the Poisson reference with rate
// lambda_ref; returns (estimate, standard error).
std::pair<double, double> relative_entropy(const ParametricModel& model,
                                           const ParameterVector& theta,
                                           double lambda_ref, double T, double dt,
                                           int n_traj, std::uint64_t seed);

}  // namespace qfilter
