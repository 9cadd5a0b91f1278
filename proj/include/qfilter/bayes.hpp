#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qfilter/likelihood.hpp"
#include "qfilter/model.hpp"
#include "qfilter/record.hpp"

namespace qfilter {

// Independent per-parameter prior.  Uniform(lo=a, hi=b), Normal(mu=a,
// sigma=b) or Gamma(shape=a, rate=b).
struct Prior {
  enum class Kind { Uniform, Normal, Gamma };
  Kind kind = Kind::Uniform;
  double a = 0.0;
  double b = 1.0;

  static Prior uniform(double lo, double hi);
  static Prior normal(double mu, double sigma);
  static Prior gamma(double shape, double rate);

  // -inf outside the support.
  double log_density(double x) const;
  double sample(std::mt19937_64& eng) const;
};

// A posterior-inference problem: which parameters of theta0 are unknown
// and their priors; the rest stay fixed at their theta0 values.
struct InferenceSetup {
  const ParametricModel* model = nullptr;
  ParameterVector theta0;
  std::vector<std::string> unknown;
  std::vector<Prior> priors;
  double lambda_ref = 1.0;
  std::optional<DensityMatrix> initial;

  void validate() const;
  ParameterVector with_unknowns(const std::vector<double>& x) const;
  double log_prior(const std::vector<double>& x) const;
};

struct GridAxis {
  std::string name;
  std::vector<double> points;

  static GridAxis linspace(const std::string& name, double lo, double hi, int n);
};

// Normalized posterior weights on a tensor-product grid (row-major over
// the axes, last axis fastest).
struct GridPosterior {
  std::vector<GridAxis> axes;
  std::vector<double> log_weights;
  bool normalized = false;

  std::size_t size() const { return log_weights.size(); }
  std::vector<double> point(std::size_t flat_index) const;
  void normalize();  // log-sum-exp
  std::vector<double> probabilities() const;
};

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

GridPosterior grid_posterior(const InferenceSetup& setup, const Record& record,
                             const std::vector<GridAxis>& axes);

// One normalized posterior per requested time, from a single replay per
// grid point; matches grid_posterior on the truncated record exactly.
std::vector<GridPosterior> posterior_evolution(const InferenceSetup& setup,
                                               const Record& record,
                                               const std::vector<GridAxis>& axes,
                                               const std::vector<double>& times);

struct ProposalConfig {
  // Symmetric multivariate-normal proposal covariance (diagonal given as
  // standard deviations per unknown).
  std::vector<double> std_dev;
  // Steps of the adaptation phase; the global proposal scale is tuned to
  // keep the acceptance rate within [0.10, 0.50], then frozen.
  int adapt_burnin = 0;
};

struct MCMCChain {
  std::vector<std::string> names;
  std::vector<std::vector<double>> samples;  // one entry per step
  std::vector<double> logliks;               // log posterior (up to a constant)
  std::vector<bool> accepted_flags;
  std::int64_t accepted = 0;
  int n_burnin = 0;
  std::vector<double> proposal_std_final;

  double acceptance_rate() const {
    return samples.empty() ? 0.0 : static_cast<double>(accepted) / samples.size();
  }
};

MCMCChain mh_sample(const InferenceSetup& setup, const Record& record,
                    const ProposalConfig& proposal, std::int64_t n_steps,
                    std::uint64_t seed);

// Variant with an injected log-target (for known-target validation);
// the target receives the unknown-parameter vector.
MCMCChain mh_sample_target(const InferenceSetup& setup,
                           const std::function<double(const std::vector<double>&)>& log_target,
                           const ProposalConfig& proposal, std::int64_t n_steps,
                           std::uint64_t seed);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double stddev = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  std::vector<double> hist_edges;
  std::vector<std::int64_t> hist_counts;
};

struct PairHistogram {
  std::string name_x, name_y;
  std::vector<double> edges_x, edges_y;
  std::vector<std::int64_t> counts;  // row-major, y fastest
};

struct ChainSummary {
  std::vector<ParamSummary> params;
  std::vector<PairHistogram> pairs;
  double acceptance_rate = 0.0;
  std::int64_t n_samples = 0;
};

ChainSummary summarize(const MCMCChain& chain, std::int64_t burnin,
                       int hist_bins = 40, int pair_bins = 20);

}  // namespace qfilter
