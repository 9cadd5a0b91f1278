#include "qfilter/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "qfilter/rng.hpp"
#include "qfilter/stepper.hpp"

namespace qfilter {

namespace {

constexpr double kRateWarnThreshold = 0.1;

std::vector<std::int64_t> snap_steps(const std::vector<double>& times, double dt) {
  std::vector<std::int64_t> steps;
  steps.reserve(times.size());
  for (double t : times) steps.push_back(static_cast<std::int64_t>(std::llround(t / dt)));
  return steps;
}

void maybe_snapshot(const std::vector<std::int64_t>& snaps, std::int64_t k, double dt,
                    int dim, const cplx* v,
                    std::vector<std::pair<double, DensityMatrix>>& out) {
  for (std::int64_t s : snaps)
    if (s == k)
      out.emplace_back(static_cast<double>(k) * dt,
                       project_psd(FilterStepper::to_mat(dim, v)));
}

void check_horizon(double T, double dt) {
  if (!(dt > 0.0) || !(T >= dt))
    throw std::invalid_argument("simulate: need dt > 0 and T >= dt");
}

DensityMatrix initial_or(const ParametricModel& model, const ParameterVector& theta,
                         const SimOptions& opts) {
  if (opts.initial) {
    if (opts.initial->dim() != model.dim())
      throw std::invalid_argument("simulate: initial state dimension mismatch");
    return *opts.initial;
  }
  return model.initial_state(theta);
}

}  // namespace

SimOutput simulate_jump(const ParametricModel& model, const ParameterVector& theta,
                        double T, double dt, std::uint64_t seed,
                        const SimOptions& opts) {
  check_horizon(T, dt);
  FilterStepper stepper(model.build(theta), dt, Measurement::Jump);
  const auto snaps = snap_steps(opts.state_times, dt);
  const std::int64_t n = step_count(T, dt);

  std::vector<cplx> v(static_cast<std::size_t>(stepper.vdim()));
  FilterStepper::to_vec(initial_or(model, theta, opts).mat, v.data());

  auto eng = make_engine(seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SimOutput out;
  JumpRecord record{T, dt, {}};
  maybe_snapshot(snaps, 0, dt, stepper.dim(), v.data(), out.states);

  for (std::int64_t k = 0; k < n; ++k) {
    const double p = stepper.emission_rate(v.data()) * dt;
    if (p > kRateWarnThreshold) out.rate_warning = true;
    double dl;
    if (unif(eng) < p) {
      record.clicks.push_back(static_cast<double>(k) * dt);
      dl = stepper.click_step(v.data());
    } else {
      dl = stepper.deterministic_step(v.data());
    }
    if (dl == FilterStepper::kImpossible)
      throw std::domain_error("simulate_jump: step instability (non-positive trace)");
    maybe_snapshot(snaps, k + 1, dt, stepper.dim(), v.data(), out.states);
  }

  out.record = std::move(record);
  return out;
}

SimOutput simulate_diffusion(const ParametricModel& model,
                             const ParameterVector& theta, double T, double dt,
                             std::uint64_t seed, const SimOptions& opts) {
  check_horizon(T, dt);
  FilterStepper stepper(model.build(theta), dt, Measurement::Diffusion);
  const auto snaps = snap_steps(opts.state_times, dt);
  const std::int64_t n = step_count(T, dt);

  std::vector<cplx> v(static_cast<std::size_t>(stepper.vdim()));
  FilterStepper::to_vec(initial_or(model, theta, opts).mat, v.data());

  auto eng = make_engine(seed, 0);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));

  SimOutput out;
  DiffusionRecord record{T, dt, {}};
  record.dy.reserve(static_cast<std::size_t>(n));
  maybe_snapshot(snaps, 0, dt, stepper.dim(), v.data(), out.states);

  for (std::int64_t k = 0; k < n; ++k) {
    if (stepper.emission_rate(v.data()) * dt > kRateWarnThreshold)
      out.rate_warning = true;
    const double dy = stepper.homodyne_mean(v.data()) * dt + normal(eng);
    record.dy.push_back(dy);
    if (stepper.diffusion_step(v.data(), dy) == FilterStepper::kImpossible)
      throw std::domain_error(
          "simulate_diffusion: step instability (non-positive trace)");
    maybe_snapshot(snaps, k + 1, dt, stepper.dim(), v.data(), out.states);
  }

  out.record = std::move(record);
  return out;
}

SimOutput simulate_bimodal_truth(const BimodalModel& model,
                                 const ParameterVector& theta, double T, double dt,
                                 std::uint64_t seed, const SimOptions& opts) {
  check_horizon(T, dt);
  const double w_ab = theta.get("W_ab"), w_ba = theta.get("W_ba");
  FilterStepper steppers[2] = {
      FilterStepper(model.config_operators(theta, 0), dt, Measurement::Jump),
      FilterStepper(model.config_operators(theta, 1), dt, Measurement::Jump)};
  const auto snaps = snap_steps(opts.state_times, dt);
  const std::int64_t n = step_count(T, dt);

  std::vector<cplx> v(4);
  if (opts.initial) {
    if (opts.initial->dim() != 2)
      throw std::invalid_argument(
          "simulate_bimodal_truth: initial state must be the two-level atomic state");
    FilterStepper::to_vec(opts.initial->mat, v.data());
  } else {
    FilterStepper::to_vec(ground_state().mat, v.data());
  }

  auto eng = make_engine(seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int cfg = unif(eng) < BimodalModel::stationary_config(w_ab, w_ba).first ? 0 : 1;

  SimOutput out;
  out.hidden_path.emplace_back(0.0, cfg);
  JumpRecord record{T, dt, {}};
  maybe_snapshot(snaps, 0, dt, 2, v.data(), out.states);

  for (std::int64_t k = 0; k < n; ++k) {
    const double switch_rate = cfg == 0 ? w_ab : w_ba;
    if (unif(eng) < switch_rate * dt) {
      cfg = 1 - cfg;
      out.hidden_path.emplace_back(static_cast<double>(k) * dt, cfg);
    }
    FilterStepper& stepper = steppers[cfg];
    const double p = stepper.emission_rate(v.data()) * dt;
    if (p > kRateWarnThreshold) out.rate_warning = true;
    double dl;
    if (unif(eng) < p) {
      record.clicks.push_back(static_cast<double>(k) * dt);
      dl = stepper.click_step(v.data());
    } else {
      dl = stepper.deterministic_step(v.data());
    }
    if (dl == FilterStepper::kImpossible)
      throw std::domain_error(
          "simulate_bimodal_truth: step instability (non-positive trace)");
    maybe_snapshot(snaps, k + 1, dt, 2, v.data(), out.states);
  }

  out.record = std::move(record);
  return out;
}

}  // namespace qfilter
