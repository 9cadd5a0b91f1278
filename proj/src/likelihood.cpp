#include "qfilter/likelihood.hpp"

#include <cmath>
#include <stdexcept>

#include "qfilter/rng.hpp"
#include "qfilter/simulate.hpp"
#include "qfilter/stepper.hpp"

namespace qfilter {

namespace {

DensityMatrix initial_or(const ParametricModel& model, const ParameterVector& theta,
                         const LikelihoodOptions& opts) {
  if (opts.initial) {
    if (opts.initial->dim() != model.dim())
      throw std::invalid_argument("loglik: initial state dimension mismatch");
    return *opts.initial;
  }
  return model.initial_state(theta);
}

class SnapshotSink {
 public:
  SnapshotSink(const std::vector<double>& times, double dt, int dim)
      : dt_(dt), dim_(dim) {
    for (double t : times)
      steps_.push_back(static_cast<std::int64_t>(std::llround(t / dt)));
  }

  // base is the theta-dependent log-likelihood part after k steps of
  // which n_clicks were clicks; offset(k, n_clicks) supplies the
  // lambda-dependent remainder.
  template <typename Offset>
  void observe(std::int64_t k, std::int64_t n_clicks, double base, const cplx* v,
               const Offset& offset, LikelihoodResult& out) const {
    for (std::int64_t s : steps_)
      if (s == k)
        out.trajectory.push_back({static_cast<double>(k) * dt_,
                                  base + offset(k, n_clicks), base,
                                  project_psd(FilterStepper::to_mat(dim_, v))});
  }

 private:
  double dt_;
  int dim_;
  std::vector<std::int64_t> steps_;
};

}  // namespace

LikelihoodResult loglik_jump(const ParametricModel& model,
                             const ParameterVector& theta, const JumpRecord& record,
                             double lambda_ref, const LikelihoodOptions& opts) {
  record.validate();
  if (!(lambda_ref > 0.0))
    throw std::invalid_argument("loglik_jump: lambda_ref must be positive");
  FilterStepper stepper(model.build(theta), record.dt, Measurement::Jump);
  const auto clicks = record.click_steps();
  const std::int64_t n = record.n_steps();

  std::vector<cplx> v(static_cast<std::size_t>(stepper.vdim()));
  FilterStepper::to_vec(initial_or(model, theta, opts).mat, v.data());

  // No-click steps contribute lambda*dt, click steps -log(lambda); both
  // are theta-independent, so they are added outside the running sum.
  const double log_lambda = std::log(lambda_ref);
  const auto offset = [&](std::int64_t steps, std::int64_t n_clicks) {
    return lambda_ref * record.dt * static_cast<double>(steps - n_clicks) -
           static_cast<double>(n_clicks) * log_lambda;
  };

  SnapshotSink snaps(opts.snapshot_times, record.dt, stepper.dim());
  LikelihoodResult out;
  double base = 0.0;
  std::int64_t n_clicks = 0;
  snaps.observe(0, 0, base, v.data(), offset, out);

  std::size_t next_click = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    double dl;
    if (next_click < clicks.size() && clicks[next_click] == k) {
      ++next_click;
      ++n_clicks;
      dl = stepper.click_step(v.data());
    } else {
      dl = stepper.deterministic_step(v.data());
    }
    if (dl == FilterStepper::kImpossible) {
      out.loglik = FilterStepper::kImpossible;
      out.loglik_base = FilterStepper::kImpossible;
      out.impossible = true;
      return out;
    }
    base += dl;
    snaps.observe(k + 1, n_clicks, base, v.data(), offset, out);
  }

  out.loglik_base = base;
  out.loglik = base + offset(n, n_clicks);
  return out;
}

LikelihoodResult loglik_diffusion(const ParametricModel& model,
                                  const ParameterVector& theta,
                                  const DiffusionRecord& record,
                                  const LikelihoodOptions& opts) {
  record.validate();
  FilterStepper stepper(model.build(theta), record.dt, Measurement::Diffusion);
  const std::int64_t n = record.n_steps();

  std::vector<cplx> v(static_cast<std::size_t>(stepper.vdim()));
  FilterStepper::to_vec(initial_or(model, theta, opts).mat, v.data());

  // The Wiener reference measure carries no lambda offset.
  const auto offset = [](std::int64_t, std::int64_t) { return 0.0; };

  SnapshotSink snaps(opts.snapshot_times, record.dt, stepper.dim());
  LikelihoodResult out;
  double l = 0.0;
  snaps.observe(0, 0, l, v.data(), offset, out);

  for (std::int64_t k = 0; k < n; ++k) {
    const double dl =
        stepper.diffusion_step(v.data(), record.dy[static_cast<std::size_t>(k)]);
    if (dl == FilterStepper::kImpossible) {
      out.loglik = FilterStepper::kImpossible;
      out.loglik_base = FilterStepper::kImpossible;
      out.impossible = true;
      return out;
    }
    l += dl;
    snaps.observe(k + 1, 0, l, v.data(), offset, out);
  }

  out.loglik = l;
  out.loglik_base = l;
  return out;
}

LikelihoodResult loglik(const ParametricModel& model, const ParameterVector& theta,
                        const Record& record, double lambda_ref,
                        const LikelihoodOptions& opts) {
  if (const auto* jump = std::get_if<JumpRecord>(&record))
    return loglik_jump(model, theta, *jump, lambda_ref, opts);
  return loglik_diffusion(model, theta, std::get<DiffusionRecord>(record), opts);
}

std::pair<double, double> relative_entropy(const ParametricModel& model,
                                           const ParameterVector& theta,
                                           double lambda_ref, double T, double dt,
                                           int n_traj, std::uint64_t seed) {
  if (n_traj < 2)
    throw std::invalid_argument("relative_entropy: need at least 2 trajectories");
  double sum = 0.0, sumsq = 0.0;
  for (int k = 0; k < n_traj; ++k) {
    SimOutput sim = simulate_jump(model, theta, T, dt, substream_seed(seed, k));
    const auto& record = std::get<JumpRecord>(sim.record);
    const double l = loglik_jump(model, theta, record, lambda_ref).loglik;
    sum += l;
    sumsq += l * l;
  }
  const double mean = sum / n_traj;
  const double var = std::max(0.0, (sumsq - n_traj * mean * mean) / (n_traj - 1));
  return {mean, std::sqrt(var / n_traj)};
}

}  // namespace qfilter
