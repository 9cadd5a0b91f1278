// Acceptance checks for the full pipeline: one PASS/FAIL line per
// criterion, nonzero exit if any fail.  These runs are deliberately
// heavier than the unit tests (minutes, not seconds).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qfilter/bayes.hpp"
#include "qfilter/fisher.hpp"
#include "qfilter/likelihood.hpp"
#include "qfilter/model.hpp"
#include "qfilter/rng.hpp"
#include "qfilter/simulate.hpp"

using namespace qfilter;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// --- small helpers ---------------------------------------------------------

double simpson(const std::function<double(double)>& f, double a, double b,
               int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
  return s * h / 3.0;
}

// Classical RK4 for the unconditional master equation (ensemble mean).
CMat lindblad_rhs(const OperatorSet& ops, const CMat& rho) {
  CMat r = cplx{0.0, -1.0} * commutator(ops.H, rho);
  r += lindblad_dissipator(ops.c, rho);
  for (const auto& j : ops.hidden) r += lindblad_dissipator(j, rho);
  return r;
}

CMat rk4_lindblad(const OperatorSet& ops, CMat rho, double t, double dt) {
  const auto n = static_cast<long>(std::llround(t / dt));
  for (long k = 0; k < n; ++k) {
    const CMat k1 = lindblad_rhs(ops, rho);
    const CMat k2 = lindblad_rhs(ops, rho + 0.5 * dt * k1);
    const CMat k3 = lindblad_rhs(ops, rho + 0.5 * dt * k2);
    const CMat k4 = lindblad_rhs(ops, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

// Independent replay of the linear (unnormalized) filter: the trace of
// the unnormalized state is the likelihood ratio.
double linear_loglik_jump(const OperatorSet& ops, const CMat& rho0,
                          const JumpRecord& rec, double lambda) {
  const CMat ctc = ops.c.adjoint() * ops.c;
  CMat m = rho0;
  const auto clicks = rec.click_steps();
  std::size_t ci = 0;
  double logtr = 0.0;
  for (std::int64_t k = 0; k < rec.n_steps(); ++k) {
    if (ci < clicks.size() && clicks[ci] == k) {
      m = ops.c * m * ops.c.adjoint();
      m *= cplx{1.0 / lambda, 0.0};
      ++ci;
    } else {
      CMat rhs = cplx{0.0, -1.0} * commutator(ops.H, m);
      rhs -= cplx{0.5, 0.0} * (ctc * m + m * ctc);
      for (const auto& j : ops.hidden) rhs += lindblad_dissipator(j, m);
      m += cplx{rec.dt, 0.0} * rhs;
      m *= cplx{std::exp(lambda * rec.dt), 0.0};
    }
    const double tr = m.trace().real();
    if (!(tr > 0.0)) return -kInf;
    logtr += std::log(tr);
    m *= cplx{1.0 / tr, 0.0};
  }
  return logtr;
}

double linear_loglik_diffusion(const OperatorSet& ops, const CMat& rho0,
                               const DiffusionRecord& rec) {
  CMat m = rho0;
  double logtr = 0.0;
  for (std::int64_t k = 0; k < rec.n_steps(); ++k) {
    CMat rhs = cplx{0.0, -1.0} * commutator(ops.H, m);
    rhs += lindblad_dissipator(ops.c, m);
    for (const auto& j : ops.hidden) rhs += lindblad_dissipator(j, m);
    CMat next = m;
    next += cplx{rec.dt, 0.0} * rhs;
    next += cplx{rec.dy[static_cast<std::size_t>(k)], 0.0} *
            (ops.c * m + m * ops.c.adjoint());
    m = next;
    const double tr = m.trace().real();
    if (!(tr > 0.0)) return -kInf;
    logtr += std::log(tr);
    m *= cplx{1.0 / tr, 0.0};
  }
  return logtr;
}

struct Criterion {
  int id;
  const char* title;
  bool (*run)(std::string& detail);
};

// --- 1: closed-form waiting-time likelihood --------------------------------

bool run_closed_form(std::string& detail) {
  TwoLevelModel model;
  const double gamma = 0.55, lambda = 1.0, t1 = 1.0, T = 2.0;
  const auto theta = make_theta(model, {0.0, 0.0, gamma});
  const double exact =
      (lambda - gamma) * t1 + std::log(gamma / lambda) + lambda * (T - t1);
  LikelihoodOptions opts;
  opts.initial = excited_state();
  auto value = [&](double dt) {
    JumpRecord rec{T, dt, {t1}};
    return loglik_jump(model, theta, rec, lambda, opts).loglik;
  };
  const double e1 = std::abs(value(1e-3) - exact);
  const double e2 = std::abs(value(5e-4) - exact);
  const double ratio = e1 / e2;
  char buf[160];
  std::snprintf(buf, sizeof buf, "err(dt=1e-3)=%.3g, halving ratio=%.2f", e1, ratio);
  detail = buf;
  return e1 < 5e-3 && ratio > 1.4 && ratio < 2.6;
}

// --- 2: tangent gradient vs finite differences -----------------------------

bool run_gradient_identity(std::string& detail) {
  TwoLevelModel model;
  std::mt19937_64 eng(1001);
  std::uniform_real_distribution<double> u(0.4, 1.6);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto theta_true = make_theta(model, {u(eng), u(eng) - 1.0, u(eng)});
    const bool jump = rep % 2 == 0;
    const Record record =
        jump ? simulate_jump(model, theta_true, 4.0, 0.01,
                             substream_seed(2001, static_cast<std::uint64_t>(rep)))
                   .record
             : simulate_diffusion(model, theta_true, 2.0, 0.005,
                                  substream_seed(2002, static_cast<std::uint64_t>(rep)))
                   .record;
    const auto theta = make_theta(model, {u(eng), u(eng) - 1.0, u(eng)});
    const auto grad = loglik_gradient(model, theta, record);
    if (!grad) return false;
    for (int i = 0; i < 3; ++i) {
      const double eps = 1e-4;
      ParameterVector plus = theta, minus = theta;
      plus.values[static_cast<std::size_t>(i)] += eps;
      minus.values[static_cast<std::size_t>(i)] -= eps;
      const double fd = (loglik(model, plus, record, 1.0).loglik -
                         loglik(model, minus, record, 1.0).loglik) /
                        (2.0 * eps);
      const double rel = std::abs((*grad)[static_cast<std::size_t>(i)] - fd) /
                         std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst relative deviation %.2e", worst);
  detail = buf;
  return worst < 1e-3;
}

// --- 3: decay-rate information vs quadrature oracle ------------------------

bool run_fisher_oracle(std::string& detail) {
  TwoLevelModel model;
  const double gamma = 0.55, T = 40.0;
  const auto theta = make_theta(model, {0.0, 0.0, gamma});
  const double oracle = simpson(
      [&](double t) {
        const double d = 1.0 / gamma - t;
        return gamma * std::exp(-gamma * t) * d * d;
      },
      0.0, T) + std::exp(-gamma * T) * T * T;
  ScoreOptions opts;
  opts.initial = excited_state();
  const auto fi =
      estimate_fisher(model, theta, T, 0.01, 5000, 3001, Measurement::Jump, opts);
  const double est = fi(2, 2), se = fi.se(2, 2);
  char buf[128];
  std::snprintf(buf, sizeof buf, "estimate %.4f vs oracle %.4f (se %.4f)", est,
                oracle, se);
  detail = buf;
  return std::abs(est - oracle) < 3.0 * se;
}

// --- 4: information-map symmetry on the drive grid -------------------------

bool run_fisher_symmetry(std::string& detail) {
  TwoLevelModel model;
  const int n = 9;
  std::vector<double> pts(n);
  for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = -1.5 + 3.0 * i / (n - 1);

  struct Cell {
    double i_oo, i_dd, i_od;
    double se_oo, se_dd, se_od;
  };
  std::vector<Cell> grid(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const auto theta = make_theta(model, {pts[static_cast<std::size_t>(a)],
                                            pts[static_cast<std::size_t>(b)], 0.55});
      const auto fi = estimate_fisher(
          model, theta, 40.0, 0.01, 200,
          substream_seed(4001, static_cast<std::uint64_t>(a * n + b)),
          Measurement::Jump);
      grid[static_cast<std::size_t>(a) * n + b] =
          {fi(0, 0), fi(1, 1), fi(0, 1), fi.se(0, 0), fi.se(1, 1), fi.se(0, 1)};
    }
  }

  int checks = 0, passes = 0;
  auto compare = [&](const Cell& x, const Cell& y) {
    auto ok = [&](double vx, double vy, double sx, double sy) {
      ++checks;
      if (std::abs(vx - vy) <= 3.0 * std::sqrt(sx * sx + sy * sy)) ++passes;
    };
    ok(x.i_oo, y.i_oo, x.se_oo, y.se_oo);
    ok(x.i_dd, y.i_dd, x.se_dd, y.se_dd);
    // The likelihood is even under either sign flip, so the cross term
    // flips sign; compare magnitudes.
    ok(std::abs(x.i_od), std::abs(y.i_od), x.se_od, y.se_od);
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (pts[static_cast<std::size_t>(a)] > 0.0)
        compare(grid[static_cast<std::size_t>(a) * n + b],
                grid[static_cast<std::size_t>(n - 1 - a) * n + b]);
      if (pts[static_cast<std::size_t>(b)] > 0.0)
        compare(grid[static_cast<std::size_t>(a) * n + b],
                grid[static_cast<std::size_t>(a) * n + (n - 1 - b)]);
    }
  const double frac = static_cast<double>(passes) / checks;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d/%d mirror checks within 3 SE (%.1f%%)",
                passes, checks, 100.0 * frac);
  detail = buf;
  return frac >= 0.95;
}

// --- 5: grid posterior vs MCMC histogram ------------------------------------

bool run_grid_vs_mcmc(std::string& detail) {
  TwoLevelModel model;
  const auto theta = make_theta(model, {1.3, 1.43, 0.55});

  // First seed whose record carries at least 15 clicks.
  JumpRecord rec;
  std::uint64_t seed = 0;
  for (seed = 1; seed < 64; ++seed) {
    rec = std::get<JumpRecord>(simulate_jump(model, theta, 200.0, 0.01, seed).record);
    if (rec.clicks.size() >= 15) break;
  }
  if (rec.clicks.size() < 15) {
    detail = "no record with 15 clicks found";
    return false;
  }

  InferenceSetup setup;
  setup.model = &model;
  setup.theta0 = theta;
  setup.unknown = {"Delta"};
  setup.priors = {Prior::normal(2.0, 1.0)};

  const double lo = -2.0, hi = 6.0;
  const int n_grid = 200;
  const auto axis = GridAxis::linspace("Delta", lo, hi, n_grid);
  const auto post = grid_posterior(setup, Record{rec}, {axis});
  const auto p = post.probabilities();

  ProposalConfig prop;
  prop.std_dev = {0.5};
  prop.adapt_burnin = 10000;
  const auto chain = mh_sample(setup, Record{rec}, prop, 100000, 5001);

  const double h = (hi - lo) / (n_grid - 1);
  std::vector<double> q(static_cast<std::size_t>(n_grid), 0.0);
  std::size_t kept = 0;
  for (std::size_t k = 10000; k < chain.samples.size(); ++k) {
    auto idx = static_cast<std::int64_t>(std::lround((chain.samples[k][0] - lo) / h));
    idx = std::clamp<std::int64_t>(idx, 0, n_grid - 1);
    q[static_cast<std::size_t>(idx)] += 1.0;
    ++kept;
  }
  for (double& v : q) v /= static_cast<double>(kept);

  const double tv = total_variation(p, q);
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "record seed %llu with %zu clicks, TV(grid, chain) = %.4f",
                static_cast<unsigned long long>(seed), rec.clicks.size(), tv);
  detail = buf;
  return tv <= 0.05;
}

// --- 6: known-target MCMC moments -------------------------------------------

bool run_mcmc_known_target(std::string& detail) {
  TwoLevelModel model;
  InferenceSetup setup;
  setup.model = &model;
  setup.theta0 = make_theta(model, {1.0, 0.0, 0.55});
  setup.unknown = {"Omega", "Delta"};
  setup.priors = {Prior::uniform(-20.0, 20.0), Prior::uniform(-20.0, 20.0)};

  const double m1 = 1.0, s1 = 0.7, m2 = -0.5, s2 = 0.3, rho = 0.6;
  auto target = [&](const std::vector<double>& x) {
    const double z1 = (x[0] - m1) / s1;
    const double z2 = (x[1] - m2) / s2;
    return -0.5 / (1.0 - rho * rho) * (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2);
  };

  ProposalConfig prop;
  prop.std_dev = {s1, s2};
  prop.adapt_burnin = 5000;
  const std::int64_t n_steps = 100000, burnin = 5000;
  const auto chain = mh_sample_target(setup, target, prop, n_steps, 6001);

  double mx = 0.0, my = 0.0;
  const auto n_kept = static_cast<double>(n_steps - burnin);
  for (std::int64_t k = burnin; k < n_steps; ++k) {
    mx += chain.samples[static_cast<std::size_t>(k)][0];
    my += chain.samples[static_cast<std::size_t>(k)][1];
  }
  mx /= n_kept;
  my /= n_kept;
  double vxx = 0.0, vyy = 0.0, vxy = 0.0;
  for (std::int64_t k = burnin; k < n_steps; ++k) {
    const double dx = chain.samples[static_cast<std::size_t>(k)][0] - mx;
    const double dy = chain.samples[static_cast<std::size_t>(k)][1] - my;
    vxx += dx * dx;
    vyy += dy * dy;
    vxy += dx * dy;
  }
  vxx /= n_kept - 1.0;
  vyy /= n_kept - 1.0;
  vxy /= n_kept - 1.0;

  const double rate = chain.acceptance_rate();
  const bool ok = std::abs(mx - m1) < 0.05 * s1 && std::abs(my - m2) < 0.05 * s2 &&
                  std::abs(std::sqrt(vxx) - s1) < 0.05 * s1 &&
                  std::abs(std::sqrt(vyy) - s2) < 0.05 * s2 &&
                  std::abs(vxy - rho * s1 * s2) < 0.05 * s1 * s2 &&
                  rate >= 0.10 && rate <= 0.50;
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "mean (%.3f, %.3f), std (%.3f, %.3f), cov %.3f, acceptance %.2f",
                mx, my, std::sqrt(vxx), std::sqrt(vyy), vxy, rate);
  detail = buf;
  return ok;
}

// --- 7: conjugate Gamma posterior -------------------------------------------

bool run_conjugate(std::string& detail) {
  TwoLevelModel model;
  const double t1 = 1.0, alpha = 2.0, beta = 1.0;
  InferenceSetup setup;
  setup.model = &model;
  setup.theta0 = make_theta(model, {0.0, 0.0, 1.0});
  setup.unknown = {"gamma"};
  setup.priors = {Prior::gamma(alpha, beta)};
  setup.initial = excited_state();
  JumpRecord rec{1.5, 1e-4, {t1}};

  const auto axis = GridAxis::linspace("gamma", 0.05, 3.0, 400);
  const auto post = grid_posterior(setup, Record{rec}, {axis});

  // One observed decay: Gamma(alpha, beta) -> Gamma(alpha + 1, beta + t1).
  const Prior conjugate = Prior::gamma(alpha + 1.0, beta + t1);
  std::vector<double> expected(axis.points.size());
  double z = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i)
    z += expected[i] = std::exp(conjugate.log_density(axis.points[i]));
  for (auto& e : expected) e /= z;

  const double tv = total_variation(post.probabilities(), expected);
  char buf[64];
  std::snprintf(buf, sizeof buf, "TV = %.2e", tv);
  detail = buf;
  return tv < 1e-3;
}

// --- 8: ensemble mean of conditioned states vs Lindblad ---------------------

bool run_ensemble_consistency(std::string& detail) {
  TwoLevelModel model;
  const auto theta = make_theta(model, {1.3, 1.43, 0.55});
  const OperatorSet ops = model.build(theta);
  const double T = 5.0, dt = 0.0025;
  const int n_traj = 1000;
  std::vector<double> times;
  for (int k = 1; k <= 10; ++k) times.push_back(0.5 * k);

  // Oracle Bloch trajectories from the deterministic master equation.
  std::vector<std::array<double, 3>> oracle;
  for (double t : times) {
    const CMat rho = rk4_lindblad(ops, model.initial_state(theta).mat, t, 1e-3);
    oracle.push_back(bloch_vector(DensityMatrix{rho.hermitized()}));
  }

  double worst_z = 0.0;
  for (Measurement kind : {Measurement::Jump, Measurement::Diffusion}) {
    SimOptions opts;
    opts.state_times = times;
    // mean and SE accumulators per (time, component)
    std::vector<std::array<double, 3>> sum(times.size(), {0, 0, 0});
    std::vector<std::array<double, 3>> sum2(times.size(), {0, 0, 0});
    const std::uint64_t base = kind == Measurement::Jump ? 8001 : 8002;
    for (int k = 0; k < n_traj; ++k) {
      const SimOutput out =
          kind == Measurement::Jump
              ? simulate_jump(model, theta, T, dt,
                              substream_seed(base, static_cast<std::uint64_t>(k)), opts)
              : simulate_diffusion(model, theta, T, dt,
                                   substream_seed(base, static_cast<std::uint64_t>(k)),
                                   opts);
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const auto r = bloch_vector(out.states[ti].second);
        for (int c = 0; c < 3; ++c) {
          sum[ti][static_cast<std::size_t>(c)] += r[static_cast<std::size_t>(c)];
          sum2[ti][static_cast<std::size_t>(c)] +=
              r[static_cast<std::size_t>(c)] * r[static_cast<std::size_t>(c)];
        }
      }
    }
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      for (int c = 0; c < 3; ++c) {
        const double mean = sum[ti][static_cast<std::size_t>(c)] / n_traj;
        const double var =
            (sum2[ti][static_cast<std::size_t>(c)] - n_traj * mean * mean) /
            (n_traj - 1.0);
        const double se = std::sqrt(std::max(var, 1e-30) / n_traj);
        const double z =
            std::abs(mean - oracle[ti][static_cast<std::size_t>(c)]) / se;
        worst_z = std::max(worst_z, z);
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst |mean - oracle| = %.2f SE", worst_z);
  detail = buf;
  return worst_z < 3.0;
}

// --- 9: exact invariances ----------------------------------------------------

bool run_invariances(std::string& detail) {
  TwoLevelModel model;
  const auto theta = make_theta(model, {1.3, 1.43, 0.55});

  // (a) Posteriors are exactly independent of the reference rate.
  const auto out = simulate_jump(model, theta, 20.0, 0.01, 9001);
  InferenceSetup setup;
  setup.model = &model;
  setup.theta0 = theta;
  setup.unknown = {"Omega"};
  setup.priors = {Prior::uniform(0.2, 3.0)};
  const auto axis = GridAxis::linspace("Omega", 0.3, 2.8, 50);
  setup.lambda_ref = 0.3;
  const auto pa = grid_posterior(setup, out.record, {axis});
  setup.lambda_ref = 2.7;
  const auto pb = grid_posterior(setup, out.record, {axis});
  const bool lambda_ok = pa.log_weights == pb.log_weights;

  // (b) A record from a system with nothing coupled out has l identically 0.
  const auto theta0 = make_theta(model, {0.0, 0.0, 0.7});
  std::mt19937_64 eng(9002);
  std::normal_distribution<double> g(0.0, 0.1);
  DiffusionRecord flat{2.0, 0.01, {}};
  for (int k = 0; k < 200; ++k) flat.dy.push_back(g(eng));
  const bool zero_ok = loglik_diffusion(model, theta0, flat).loglik == 0.0;

  // (c) The normalized recursion agrees with the linear unnormalized one.
  double worst = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto oj = simulate_jump(model, theta, 5.0, 0.01,
                                  substream_seed(9003, static_cast<std::uint64_t>(rep)));
    const auto& jr = std::get<JumpRecord>(oj.record);
    const double a = loglik_jump(model, theta, jr, 1.3).loglik;
    const double b = linear_loglik_jump(model.build(theta),
                                        model.initial_state(theta).mat, jr, 1.3);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));

    const auto od = simulate_diffusion(model, theta, 3.0, 0.005,
                                       substream_seed(9004, static_cast<std::uint64_t>(rep)));
    const auto& dr = std::get<DiffusionRecord>(od.record);
    const double c = loglik_diffusion(model, theta, dr).loglik;
    const double d = linear_loglik_diffusion(model.build(theta),
                                             model.initial_state(theta).mat, dr);
    worst = std::max(worst, std::abs(c - d) / std::max(1.0, std::abs(d)));
  }
  const bool linear_ok = worst < 1e-8;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "reference-rate invariance %s, inert loglik %s, linear replay %.1e",
                lambda_ok ? "exact" : "BROKEN", zero_ok ? "exact" : "BROKEN", worst);
  detail = buf;
  return lambda_ok && zero_ok && linear_ok;
}

// --- 10: bimodal eight-parameter recovery ------------------------------------

bool run_bimodal_recovery(std::string& detail) {
  BimodalModel model;
  const std::vector<double> truth{1.1, 1.3, 1.6, 2.2, 0.2, 2.4, 0.03, 0.08};
  const auto theta = make_theta(model, truth);
  const auto out = simulate_bimodal_truth(model, theta, 400.0, 0.01, 10001);

  InferenceSetup setup;
  setup.model = &model;
  setup.theta0 = theta;
  setup.unknown = model.parameter_names();
  // Uniform priors; the a/b windows do not overlap, which fixes the
  // configuration labels (the model is symmetric under swapping a and b
  // together with W_ab and W_ba).
  setup.priors = {
      Prior::uniform(0.5, 1.7),    // Omega_a
      Prior::uniform(0.7, 1.9),    // Delta_a
      Prior::uniform(0.9, 2.3),    // gamma_a
      Prior::uniform(1.7, 2.9),    // Omega_b
      Prior::uniform(-0.4, 0.8),   // Delta_b
      Prior::uniform(1.7, 3.1),    // gamma_b
      Prior::uniform(0.005, 0.12), // W_ab
      Prior::uniform(0.01, 0.25),  // W_ba
  };

  ProposalConfig prop;
  prop.std_dev = {0.06, 0.06, 0.07, 0.06, 0.06, 0.07, 0.006, 0.012};
  prop.adapt_burnin = 5000;
  const std::int64_t n_steps = 40000, burnin = 5000;
  const auto chain = mh_sample(setup, out.record, prop, n_steps, 10002);
  const auto summary = summarize(chain, burnin);

  int inside = 0;
  std::string misses;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& p = summary.params[i];
    if (truth[i] >= p.q05 && truth[i] <= p.q95) {
      ++inside;
    } else {
      misses += (misses.empty() ? "" : ", ") + p.name;
    }
  }
  char buf[224];
  std::snprintf(buf, sizeof buf,
                "%d/8 true values inside 5-95%% intervals%s%s, acceptance %.2f",
                inside, misses.empty() ? "" : "; missed: ", misses.c_str(),
                chain.acceptance_rate());
  detail = buf;
  return inside >= 7;
}

const Criterion kCriteria[] = {
    {1, "closed-form waiting-time likelihood", run_closed_form},
    {2, "likelihood gradient matches finite differences", run_gradient_identity},
    {3, "decay-rate information matches quadrature oracle", run_fisher_oracle},
    {4, "information map symmetric under drive sign flips", run_fisher_symmetry},
    {5, "grid posterior agrees with MCMC histogram", run_grid_vs_mcmc},
    {6, "MCMC reproduces a known Gaussian target", run_mcmc_known_target},
    {7, "conjugate Gamma posterior on a fine grid", run_conjugate},
    {8, "ensemble mean of conditioned states follows Lindblad", run_ensemble_consistency},
    {9, "exact invariances of the likelihood", run_invariances},
    {10, "bimodal eight-parameter credible-interval recovery", run_bimodal_recovery},
};

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select individual criteria by number.
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : kCriteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("%s %2d %-55s [%s] (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                c.title, detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
