#include "qfilter/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qfilter/parallel.hpp"
#include "qfilter/rng.hpp"

namespace qfilter {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAcceptLow = 0.10;
constexpr double kAcceptHigh = 0.50;
constexpr int kAdaptWindow = 50;
constexpr int kInitRetries = 100;
}  // namespace

// ---------------------------------------------------------------------------
// priors

Prior Prior::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("Prior::uniform: need lo < hi");
  return Prior{Kind::Uniform, lo, hi};
}

Prior Prior::normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("Prior::normal: need sigma > 0");
  return Prior{Kind::Normal, mu, sigma};
}

Prior Prior::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("Prior::gamma: need shape, rate > 0");
  return Prior{Kind::Gamma, shape, rate};
}

double Prior::log_density(double x) const {
  switch (kind) {
    case Kind::Uniform:
      return (x >= a && x <= b) ? -std::log(b - a) : kNegInf;
    case Kind::Normal: {
      const double z = (x - a) / b;
      return -0.5 * z * z - std::log(b) - 0.5 * std::log(2.0 * M_PI);
    }
    case Kind::Gamma:
      if (!(x > 0.0)) return kNegInf;
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
  }
  return kNegInf;
}

double Prior::sample(std::mt19937_64& eng) const {
  switch (kind) {
    case Kind::Uniform:
      return std::uniform_real_distribution<double>(a, b)(eng);
    case Kind::Normal:
      return std::normal_distribution<double>(a, b)(eng);
    case Kind::Gamma:
      return std::gamma_distribution<double>(a, 1.0 / b)(eng);
  }
  throw std::logic_error("Prior::sample: unreachable");
}

// ---------------------------------------------------------------------------
// setup

void InferenceSetup::validate() const {
  if (model == nullptr) throw std::invalid_argument("InferenceSetup: no model");
  theta0.validate();
  if (theta0.names != model->parameter_names())
    throw std::invalid_argument("InferenceSetup: theta0 does not match model");
  if (unknown.empty() || unknown.size() != priors.size())
    throw std::invalid_argument("InferenceSetup: unknowns and priors must match");
  for (const auto& name : unknown) (void)theta0.index(name);
}

ParameterVector InferenceSetup::with_unknowns(const std::vector<double>& x) const {
  ParameterVector theta = theta0;
  for (std::size_t i = 0; i < unknown.size(); ++i)
    theta.values[static_cast<std::size_t>(theta.index(unknown[i]))] = x[i];
  return theta;
}

double InferenceSetup::log_prior(const std::vector<double>& x) const {
  double lp = 0.0;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    lp += priors[i].log_density(x[i]);
    if (lp == kNegInf) return kNegInf;
  }
  return lp;
}

// ---------------------------------------------------------------------------
// grids

GridAxis GridAxis::linspace(const std::string& name, double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("GridAxis: need at least one point");
  GridAxis axis{name, {}};
  axis.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    axis.points.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return axis;
}

std::vector<double> GridPosterior::point(std::size_t flat) const {
  std::vector<double> x(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    const std::size_t n = axes[a].points.size();
    x[a] = axes[a].points[flat % n];
    flat /= n;
  }
  return x;
}

void GridPosterior::normalize() {
  double maxw = kNegInf;
  for (double w : log_weights) maxw = std::max(maxw, w);
  if (maxw == kNegInf)
    throw std::domain_error("GridPosterior: record impossible at every grid point");
  double total = 0.0;
  for (double w : log_weights) total += std::exp(w - maxw);
  const double logz = maxw + std::log(total);
  for (double& w : log_weights) w -= logz;
  normalized = true;
}

std::vector<double> GridPosterior::probabilities() const {
  std::vector<double> p(log_weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(log_weights[i]);
  return p;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

namespace {

std::size_t grid_size(const std::vector<GridAxis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) {
    if (a.points.empty()) throw std::invalid_argument("grid axis with no points");
    n *= a.points.size();
  }
  return n;
}

}  // namespace

GridPosterior grid_posterior(const InferenceSetup& setup, const Record& record,
                             const std::vector<GridAxis>& axes) {
  setup.validate();
  validate(record);
  GridPosterior post;
  post.axes = axes;
  post.log_weights.assign(grid_size(axes), kNegInf);

  // Unknown order follows the axes here.
  InferenceSetup local = setup;
  local.unknown.clear();
  for (const auto& a : axes) local.unknown.push_back(a.name);
  if (local.unknown.size() != setup.unknown.size())
    throw std::invalid_argument("grid_posterior: axes must cover the unknowns");
  local.priors.clear();
  for (const auto& name : local.unknown) {
    auto it = std::find(setup.unknown.begin(), setup.unknown.end(), name);
    if (it == setup.unknown.end())
      throw std::invalid_argument("grid_posterior: axis for non-unknown " + name);
    local.priors.push_back(setup.priors[static_cast<std::size_t>(it - setup.unknown.begin())]);
  }

  parallel_for(post.size(), [&](std::size_t i) {
    const std::vector<double> x = post.point(i);
    const double lp = local.log_prior(x);
    if (lp == kNegInf) return;
    const ParameterVector theta = local.with_unknowns(x);
    if (!local.model->in_domain(theta)) return;
    LikelihoodOptions opts;
    opts.initial = local.initial;
    const LikelihoodResult r = loglik(*local.model, theta, record, local.lambda_ref, opts);
    // The lambda-free part: posteriors are exactly lambda-invariant.
    if (!r.impossible) post.log_weights[i] = r.loglik_base + lp;
  });

  post.normalize();
  return post;
}

std::vector<GridPosterior> posterior_evolution(const InferenceSetup& setup,
                                               const Record& record,
                                               const std::vector<GridAxis>& axes,
                                               const std::vector<double>& times) {
  setup.validate();
  validate(record);
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("posterior_evolution: times must be sorted");

  GridPosterior proto;
  proto.axes = axes;
  proto.log_weights.assign(grid_size(axes), kNegInf);

  InferenceSetup local = setup;
  local.unknown.clear();
  local.priors.clear();
  for (const auto& a : axes) {
    auto it = std::find(setup.unknown.begin(), setup.unknown.end(), a.name);
    if (it == setup.unknown.end())
      throw std::invalid_argument("posterior_evolution: axis for non-unknown " + a.name);
    local.unknown.push_back(a.name);
    local.priors.push_back(setup.priors[static_cast<std::size_t>(it - setup.unknown.begin())]);
  }

  // One replay per grid point; l_t read off at the snapshot times.
  std::vector<std::vector<double>> l_at(proto.size());
  std::vector<double> lp(proto.size(), kNegInf);
  parallel_for(proto.size(), [&](std::size_t i) {
    const std::vector<double> x = proto.point(i);
    lp[i] = local.log_prior(x);
    if (lp[i] == kNegInf) return;
    const ParameterVector theta = local.with_unknowns(x);
    if (!local.model->in_domain(theta)) {
      lp[i] = kNegInf;
      return;
    }
    LikelihoodOptions opts;
    opts.snapshot_times = times;
    opts.initial = local.initial;
    const LikelihoodResult r = loglik(*local.model, theta, record, local.lambda_ref, opts);
    std::vector<double> ls;
    ls.reserve(times.size());
    for (const auto& snap : r.trajectory) ls.push_back(snap.loglik_base);
    // Snapshots stop early for impossible records; pad with -inf.
    ls.resize(times.size(), kNegInf);
    l_at[i] = std::move(ls);
  });

  std::vector<GridPosterior> out;
  out.reserve(times.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    GridPosterior post = proto;
    for (std::size_t i = 0; i < post.size(); ++i)
      post.log_weights[i] =
          lp[i] == kNegInf || l_at[i].empty() ? kNegInf : l_at[i][ti] + lp[i];
    post.normalize();
    out.push_back(std::move(post));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metropolis-Hastings

namespace {

MCMCChain mh_core(const InferenceSetup& setup,
                  const std::function<double(const std::vector<double>&)>& log_target,
                  const ProposalConfig& proposal, std::int64_t n_steps,
                  std::uint64_t seed) {
  setup.validate();
  if (n_steps < 1) throw std::invalid_argument("mh_sample: need n_steps >= 1");
  const std::size_t n = setup.unknown.size();
  if (proposal.std_dev.size() != n)
    throw std::invalid_argument("mh_sample: proposal std_dev size mismatch");
  for (double s : proposal.std_dev)
    if (!(s > 0.0)) throw std::invalid_argument("mh_sample: proposal std_dev <= 0");

  auto init_eng = make_engine(seed, 0);
  auto prop_eng = make_engine(seed, 1);
  auto accept_eng = make_engine(seed, 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Initial point from the prior, retried while the posterior is -inf.
  std::vector<double> x(n);
  double lt = kNegInf;
  for (int attempt = 0; attempt < kInitRetries && lt == kNegInf; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) x[i] = setup.priors[i].sample(init_eng);
    lt = log_target(x);
  }
  if (lt == kNegInf)
    throw std::domain_error("mh_sample: could not find a starting point with "
                             "finite posterior");

  MCMCChain chain;
  chain.names = setup.unknown;
  chain.n_burnin = static_cast<int>(std::min<std::int64_t>(proposal.adapt_burnin, n_steps));
  chain.samples.reserve(static_cast<std::size_t>(n_steps));

  double scale = 1.0;
  int window_accepts = 0, window_len = 0;
  std::vector<double> cand(n);

  for (std::int64_t step = 0; step < n_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i)
      cand[i] = x[i] + scale * proposal.std_dev[i] * gauss(prop_eng);
    const double lt_cand = log_target(cand);

    bool accept = false;
    if (lt_cand != kNegInf) {
      const double log_alpha = lt_cand - lt;
      accept = log_alpha >= 0.0 || unif(accept_eng) < std::exp(log_alpha);
    } else {
      // Out-of-support proposals are rejected outright; the accept draw
      // is still consumed to keep the stream aligned.
      (void)unif(accept_eng);
    }
    if (accept) {
      x = cand;
      lt = lt_cand;
      ++chain.accepted;
      ++window_accepts;
    }
    chain.samples.push_back(x);
    chain.logliks.push_back(lt);
    chain.accepted_flags.push_back(accept);

    ++window_len;
    if (step < proposal.adapt_burnin && window_len == kAdaptWindow) {
      const double rate = static_cast<double>(window_accepts) / window_len;
      if (rate < kAcceptLow) scale *= 0.8;
      else if (rate > kAcceptHigh) scale *= 1.25;
      window_accepts = 0;
      window_len = 0;
    }
  }

  chain.proposal_std_final.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    chain.proposal_std_final[i] = scale * proposal.std_dev[i];
  return chain;
}

}  // namespace

MCMCChain mh_sample(const InferenceSetup& setup, const Record& record,
                    const ProposalConfig& proposal, std::int64_t n_steps,
                    std::uint64_t seed) {
  setup.validate();
  validate(record);
  auto log_target = [&setup, &record](const std::vector<double>& x) -> double {
    const double lp = setup.log_prior(x);
    if (lp == kNegInf) return kNegInf;
    const ParameterVector theta = setup.with_unknowns(x);
    if (!setup.model->in_domain(theta)) return kNegInf;
    LikelihoodOptions opts;
    opts.initial = setup.initial;
    const LikelihoodResult r =
        loglik(*setup.model, theta, record, setup.lambda_ref, opts);
    return r.impossible ? kNegInf : r.loglik_base + lp;
  };
  return mh_core(setup, log_target, proposal, n_steps, seed);
}

MCMCChain mh_sample_target(
    const InferenceSetup& setup,
    const std::function<double(const std::vector<double>&)>& log_target,
    const ProposalConfig& proposal, std::int64_t n_steps, std::uint64_t seed) {
  auto target = [&](const std::vector<double>& x) -> double {
    const double lp = setup.log_prior(x);
    return lp == kNegInf ? kNegInf : log_target(x) + lp;
  };
  return mh_core(setup, target, proposal, n_steps, seed);
}

// ---------------------------------------------------------------------------
// summaries

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

ChainSummary summarize(const MCMCChain& chain, std::int64_t burnin, int hist_bins,
                       int pair_bins) {
  const auto total = static_cast<std::int64_t>(chain.samples.size());
  if (burnin < 0 || burnin >= total)
    throw std::invalid_argument("summarize: burn-in leaves no samples");
  const auto n_kept = static_cast<std::size_t>(total - burnin);
  const std::size_t n_params = chain.names.size();

  ChainSummary summary;
  summary.acceptance_rate = chain.acceptance_rate();
  summary.n_samples = static_cast<std::int64_t>(n_kept);

  std::vector<std::vector<double>> cols(n_params, std::vector<double>(n_kept));
  for (std::size_t k = 0; k < n_kept; ++k)
    for (std::size_t p = 0; p < n_params; ++p)
      cols[p][k] = chain.samples[static_cast<std::size_t>(burnin) + k][p];

  for (std::size_t p = 0; p < n_params; ++p) {
    ParamSummary ps;
    ps.name = chain.names[p];
    double sum = 0.0;
    for (double v : cols[p]) sum += v;
    ps.mean = sum / static_cast<double>(n_kept);
    double ss = 0.0;
    for (double v : cols[p]) ss += (v - ps.mean) * (v - ps.mean);
    ps.stddev = n_kept > 1 ? std::sqrt(ss / static_cast<double>(n_kept - 1)) : 0.0;

    std::vector<double> sorted = cols[p];
    std::sort(sorted.begin(), sorted.end());
    ps.q05 = quantile_sorted(sorted, 0.05);
    ps.q95 = quantile_sorted(sorted, 0.95);

    const double lo = sorted.front(), hi = sorted.back();
    const double width = hi > lo ? (hi - lo) / hist_bins : 1.0;
    ps.hist_edges.resize(static_cast<std::size_t>(hist_bins) + 1);
    for (int b = 0; b <= hist_bins; ++b) ps.hist_edges[static_cast<std::size_t>(b)] = lo + b * width;
    ps.hist_counts.assign(static_cast<std::size_t>(hist_bins), 0);
    for (double v : cols[p]) {
      auto b = static_cast<std::int64_t>((v - lo) / width);
      b = std::clamp<std::int64_t>(b, 0, hist_bins - 1);
      ++ps.hist_counts[static_cast<std::size_t>(b)];
    }
    summary.params.push_back(std::move(ps));
  }

  for (std::size_t px = 0; px < n_params; ++px) {
    for (std::size_t py = px + 1; py < n_params; ++py) {
      PairHistogram ph;
      ph.name_x = chain.names[px];
      ph.name_y = chain.names[py];
      auto edges = [&](const std::vector<double>& c) {
        const auto [mn, mx] = std::minmax_element(c.begin(), c.end());
        const double lo = *mn, hi = *mx;
        const double width = hi > lo ? (hi - lo) / pair_bins : 1.0;
        std::vector<double> e(static_cast<std::size_t>(pair_bins) + 1);
        for (int b = 0; b <= pair_bins; ++b) e[static_cast<std::size_t>(b)] = lo + b * width;
        return e;
      };
      ph.edges_x = edges(cols[px]);
      ph.edges_y = edges(cols[py]);
      ph.counts.assign(static_cast<std::size_t>(pair_bins) * pair_bins, 0);
      const double wx = ph.edges_x[1] - ph.edges_x[0];
      const double wy = ph.edges_y[1] - ph.edges_y[0];
      for (std::size_t k = 0; k < n_kept; ++k) {
        auto bx = static_cast<std::int64_t>((cols[px][k] - ph.edges_x[0]) / wx);
        auto by = static_cast<std::int64_t>((cols[py][k] - ph.edges_y[0]) / wy);
        bx = std::clamp<std::int64_t>(bx, 0, pair_bins - 1);
        by = std::clamp<std::int64_t>(by, 0, pair_bins - 1);
        ++ph.counts[static_cast<std::size_t>(bx) * pair_bins + static_cast<std::size_t>(by)];
      }
      summary.pairs.push_back(std::move(ph));
    }
  }
  return summary;
}

}  // namespace qfilter
