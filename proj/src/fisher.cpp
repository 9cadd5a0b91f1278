#include "qfilter/fisher.hpp"

#include <cmath>
#include <stdexcept>

#include "qfilter/parallel.hpp"
#include "qfilter/rng.hpp"
#include "qfilter/simulate.hpp"
#include "qfilter/stepper.hpp"

namespace qfilter {

std::vector<double> TangentState::scores() const {
  std::vector<double> s;
  s.reserve(mats.size());
  for (const auto& m : mats) s.push_back(m.trace().real());
  return s;
}

namespace {

struct Propagated {
  bool ok = false;
  std::vector<cplx> v;
  std::vector<cplx> tangents;
  int dim = 0;
  int n_params = 0;
};

Propagated run_tangent(const ParametricModel& model, const ParameterVector& theta,
                       const Record& record, const ScoreOptions& opts) {
  validate(record);
  const Measurement kind = record_kind(record);
  const double dt = std::visit([](const auto& r) { return r.dt; }, record);
  TangentStepper stepper(model, theta, dt, kind);

  Propagated out;
  out.dim = stepper.filter().dim();
  out.n_params = stepper.n_params();
  const auto vd = static_cast<std::size_t>(stepper.vdim());
  out.v.resize(vd);
  out.tangents.assign(vd * static_cast<std::size_t>(out.n_params), cplx{0.0, 0.0});

  DensityMatrix initial = opts.initial ? *opts.initial : model.initial_state(theta);
  if (initial.dim() != model.dim())
    throw std::invalid_argument("propagate_tangent: initial state dimension mismatch");
  FilterStepper::to_vec(initial.mat, out.v.data());

  if (const auto* jump = std::get_if<JumpRecord>(&record)) {
    const auto clicks = jump->click_steps();
    const std::int64_t n = jump->n_steps();
    std::size_t next_click = 0;
    for (std::int64_t k = 0; k < n; ++k) {
      double dl;
      if (next_click < clicks.size() && clicks[next_click] == k) {
        ++next_click;
        dl = stepper.click_step(out.v.data(), out.tangents.data());
      } else {
        dl = stepper.deterministic_step(out.v.data(), out.tangents.data());
      }
      if (dl == FilterStepper::kImpossible) return out;
    }
  } else {
    const auto& diff = std::get<DiffusionRecord>(record);
    for (double dy : diff.dy)
      if (stepper.diffusion_step(out.v.data(), out.tangents.data(), dy) ==
          FilterStepper::kImpossible)
        return out;
  }
  out.ok = true;
  return out;
}

}  // namespace

std::pair<DensityMatrix, TangentState> propagate_tangent(
    const ParametricModel& model, const ParameterVector& theta,
    const Record& record, const ScoreOptions& opts) {
  Propagated p = run_tangent(model, theta, record, opts);
  if (!p.ok)
    throw std::domain_error("propagate_tangent: record impossible under theta");
  TangentState tangent;
  const auto vd = static_cast<std::size_t>(p.dim) * p.dim;
  for (int i = 0; i < p.n_params; ++i)
    tangent.mats.push_back(FilterStepper::to_mat(p.dim, p.tangents.data() + i * vd));
  return {project_psd(FilterStepper::to_mat(p.dim, p.v.data())), std::move(tangent)};
}

std::optional<std::vector<double>> loglik_gradient(const ParametricModel& model,
                                                   const ParameterVector& theta,
                                                   const Record& record,
                                                   const ScoreOptions& opts) {
  Propagated p = run_tangent(model, theta, record, opts);
  if (!p.ok) return std::nullopt;
  std::vector<double> g(static_cast<std::size_t>(p.n_params));
  const auto vd = static_cast<std::size_t>(p.dim) * p.dim;
  for (int i = 0; i < p.n_params; ++i) {
    double tr = 0.0;
    for (int a = 0; a < p.dim; ++a) tr += p.tangents[i * vd + a * p.dim + a].real();
    g[static_cast<std::size_t>(i)] = tr;
  }
  return g;
}

FisherMatrix estimate_fisher(const ParametricModel& model,
                             const ParameterVector& theta, double T, double dt,
                             int n_traj, std::uint64_t seed, Measurement kind,
                             const ScoreOptions& opts) {
  if (n_traj < 2) throw std::invalid_argument("estimate_fisher: need n_traj >= 2");
  const int n = static_cast<int>(theta.size());

  SimOptions sim_opts;
  sim_opts.initial = opts.initial;

  std::vector<std::vector<double>> scores(static_cast<std::size_t>(n_traj));
  parallel_for(static_cast<std::size_t>(n_traj), [&](std::size_t k) {
    SimOutput sim =
        kind == Measurement::Jump
            ? simulate_jump(model, theta, T, dt, substream_seed(seed, k), sim_opts)
            : simulate_diffusion(model, theta, T, dt, substream_seed(seed, k),
                                 sim_opts);
    ScoreOptions so{opts.initial};
    auto g = loglik_gradient(model, theta, sim.record, so);
    if (!g)
      throw std::domain_error("estimate_fisher: simulated record impossible");
    scores[k] = std::move(*g);
  });

  // Deterministic accumulation in trajectory order.
  const auto nn = static_cast<std::size_t>(n) * n;
  std::vector<double> sum(nn, 0.0), sumsq(nn, 0.0);
  for (int k = 0; k < n_traj; ++k) {
    const auto& s = scores[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double p = s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)];
        sum[static_cast<std::size_t>(i) * n + j] += p;
        sumsq[static_cast<std::size_t>(i) * n + j] += p * p;
      }
  }

  FisherMatrix fm;
  fm.n = n;
  fm.n_traj = n_traj;
  fm.info.resize(nn);
  fm.std_err.resize(nn);
  for (std::size_t e = 0; e < nn; ++e) {
    const double mean = sum[e] / n_traj;
    const double var = std::max(0.0, (sumsq[e] - n_traj * mean * mean) / (n_traj - 1));
    fm.info[e] = mean;
    fm.std_err[e] = std::sqrt(var / n_traj);
  }
  // Symmetric up to rounding; enforce exactly.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto ij = static_cast<std::size_t>(i) * n + j;
      const auto ji = static_cast<std::size_t>(j) * n + i;
      fm.info[ij] = fm.info[ji] = 0.5 * (fm.info[ij] + fm.info[ji]);
      fm.std_err[ij] = fm.std_err[ji] = 0.5 * (fm.std_err[ij] + fm.std_err[ji]);
    }
  return fm;
}

}  // namespace qfilter
