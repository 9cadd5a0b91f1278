// Command-line front end: generates measurement records, replays
// likelihoods, and runs grid/MCMC posterior and Fisher-information
// scans from a JSON config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfilter/bayes.hpp"
#include "qfilter/fisher.hpp"
#include "qfilter/io.hpp"
#include "qfilter/likelihood.hpp"
#include "qfilter/model.hpp"
#include "qfilter/rng.hpp"
#include "qfilter/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qfilter;

namespace {

struct CliArgs {
  std::string config_path;
  std::string record_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& cfg) {
  return {{"config_digest", cfg.digest}, {"seed", std::to_string(cfg.seed)}};
}

RunConfig load(const CliArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  return cfg;
}

Record load_record_checked(const CliArgs& args, const RunConfig& cfg) {
  if (args.record_path.empty())
    throw std::invalid_argument("this subcommand requires --record");
  RecordFile rf = load_record(args.record_path);
  if (!rf.model.empty() && rf.model != cfg.model_name)
    throw std::invalid_argument("record was generated with model '" + rf.model +
                                "' but config uses '" + cfg.model_name + "'");
  if (record_kind(rf.record) != cfg.kind)
    throw std::invalid_argument("record kind does not match config measurement");
  return rf.record;
}

InferenceSetup make_setup(const RunConfig& cfg, const ParametricModel& model) {
  if (cfg.unknowns.empty())
    throw std::invalid_argument("config: this subcommand needs an 'unknowns' block");
  InferenceSetup setup;
  setup.model = &model;
  setup.theta0 = cfg.theta;
  for (const auto& u : cfg.unknowns) {
    setup.unknown.push_back(u.name);
    setup.priors.push_back(u.prior);
  }
  setup.lambda_ref = cfg.lambda_ref;
  if (cfg.initial != "default") setup.initial = initial_state_for(cfg, model);
  return setup;
}

std::vector<GridAxis> make_axes(const RunConfig& cfg) {
  std::vector<GridAxis> axes;
  for (const auto& u : cfg.unknowns) {
    if (!u.grid)
      throw std::invalid_argument("config: unknown '" + u.name +
                                  "' needs a grid block for posterior scans");
    axes.push_back(GridAxis::linspace(u.name, u.grid->lo, u.grid->hi, u.grid->points));
  }
  return axes;
}

int config_active_at(const std::vector<std::pair<double, int>>& path, double t) {
  int cfg = path.empty() ? 0 : path.front().second;
  for (const auto& [time, c] : path) {
    if (time > t) break;
    cfg = c;
  }
  return cfg;
}

// ---------------------------------------------------------------------------

void cmd_simulate(const CliArgs& args) {
  RunConfig cfg = load(args);
  auto model = make_model(cfg.model_name);

  SimOptions opts;
  opts.state_times = cfg.state_times;
  if (cfg.initial != "default") opts.initial = initial_state_for(cfg, *model);

  SimOutput sim;
  if (cfg.bimodal_truth) {
    const auto& bimodal = dynamic_cast<const BimodalModel&>(*model);
    sim = simulate_bimodal_truth(bimodal, cfg.theta, cfg.T, cfg.dt, cfg.seed, opts);
  } else if (cfg.kind == Measurement::Jump) {
    sim = simulate_jump(*model, cfg.theta, cfg.T, cfg.dt, cfg.seed, opts);
  } else {
    sim = simulate_diffusion(*model, cfg.theta, cfg.T, cfg.dt, cfg.seed, opts);
  }
  if (sim.rate_warning)
    std::cerr << "warning: trace(c†c rho) dt exceeded 0.1; reduce dt\n";

  RecordFile rf;
  rf.record = sim.record;
  rf.model = cfg.model_name;
  rf.theta = cfg.theta;
  rf.seed = cfg.seed;
  rf.config_digest = cfg.digest;
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  save_record(out_dir / "record.json", rf);

  if (!sim.states.empty() && sim.states.front().second.dim() == 2) {
    CsvWriter csv(out_dir / "states.csv", provenance(cfg), {"t", "r_x", "r_y", "r_z"});
    for (const auto& [t, rho] : sim.states) {
      const auto r = bloch_vector(rho);
      csv.row({t, r[0], r[1], r[2]});
    }
  }

  if (cfg.bin_width > 0.0) {
    const auto* jump = std::get_if<JumpRecord>(&sim.record);
    if (jump != nullptr) {
      const int n_bins = static_cast<int>(std::ceil(cfg.T / cfg.bin_width));
      std::vector<int> counts(static_cast<std::size_t>(n_bins), 0);
      for (double t : jump->clicks)
        ++counts[std::min<std::size_t>(static_cast<std::size_t>(t / cfg.bin_width),
                                       counts.size() - 1)];
      const bool have_path = !sim.hidden_path.empty();
      CsvWriter csv(out_dir / "bins.csv", provenance(cfg),
                    have_path ? std::vector<std::string>{"bin_start", "count", "expected_rate"}
                              : std::vector<std::string>{"bin_start", "count"});
      for (int b = 0; b < n_bins; ++b) {
        const double t0 = b * cfg.bin_width;
        std::vector<double> row{t0, static_cast<double>(counts[static_cast<std::size_t>(b)])};
        if (have_path) {
          const int c = config_active_at(sim.hidden_path, t0);
          const int off = c == 0 ? 0 : 3;
          row.push_back(stationary_emission_rate(cfg.theta.values[static_cast<std::size_t>(off)],
                                                 cfg.theta.values[static_cast<std::size_t>(off + 1)],
                                                 cfg.theta.values[static_cast<std::size_t>(off + 2)]));
        }
        csv.row(row);
      }
    }
  }
  std::cout << "record written to " << (out_dir / "record.json").string() << "\n";
}

void cmd_loglik(const CliArgs& args) {
  RunConfig cfg = load(args);
  auto model = make_model(cfg.model_name);
  const Record record = load_record_checked(args, cfg);

  LikelihoodOptions opts;
  if (cfg.initial != "default") opts.initial = initial_state_for(cfg, *model);
  if (cfg.loglik_snapshot_step > 0.0) {
    const double T = std::visit([](const auto& r) { return r.T; }, record);
    for (double t = 0.0; t <= T + 1e-12; t += cfg.loglik_snapshot_step)
      opts.snapshot_times.push_back(t);
  }

  const LikelihoodResult result =
      loglik(*model, cfg.theta, record, cfg.lambda_ref, opts);
  std::printf("loglik %.17g\n", result.loglik);

  if (!opts.snapshot_times.empty()) {
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    CsvWriter csv(out_dir / "loglik.csv", provenance(cfg), {"t", "l_t"});
    for (const auto& snap : result.trajectory) csv.row({snap.t, snap.loglik});
  }
}

void cmd_posterior(const CliArgs& args) {
  RunConfig cfg = load(args);
  auto model = make_model(cfg.model_name);
  const Record record = load_record_checked(args, cfg);
  const InferenceSetup setup = make_setup(cfg, *model);
  const auto axes = make_axes(cfg);

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);

  GridPosterior post = grid_posterior(setup, record, axes);
  {
    std::vector<std::string> cols;
    for (const auto& a : axes) cols.push_back(a.name);
    cols.push_back("probability");
    CsvWriter csv(out_dir / "posterior.csv", provenance(cfg), cols);
    const auto probs = post.probabilities();
    for (std::size_t i = 0; i < post.size(); ++i) {
      auto row = post.point(i);
      row.push_back(probs[i]);
      csv.row(row);
    }
  }

  if (!cfg.posterior_times.empty()) {
    const auto evolution = posterior_evolution(setup, record, axes, cfg.posterior_times);
    std::vector<std::string> cols{"t"};
    for (const auto& a : axes) cols.push_back(a.name);
    cols.push_back("probability");
    CsvWriter csv(out_dir / "posterior_evolution.csv", provenance(cfg), cols);
    for (std::size_t ti = 0; ti < evolution.size(); ++ti) {
      const auto probs = evolution[ti].probabilities();
      for (std::size_t i = 0; i < evolution[ti].size(); ++i) {
        std::vector<double> row{cfg.posterior_times[ti]};
        for (double c : evolution[ti].point(i)) row.push_back(c);
        row.push_back(probs[i]);
        csv.row(row);
      }
    }
  }
  std::cout << "posterior written to " << (out_dir / "posterior.csv").string() << "\n";
}

void cmd_mcmc(const CliArgs& args) {
  RunConfig cfg = load(args);
  auto model = make_model(cfg.model_name);
  const Record record = load_record_checked(args, cfg);
  const InferenceSetup setup = make_setup(cfg, *model);

  ProposalConfig proposal;
  proposal.adapt_burnin = static_cast<int>(cfg.mcmc_burnin);
  for (const auto& u : cfg.unknowns) {
    double sd;
    if (u.proposal_std) {
      sd = *u.proposal_std;
    } else {
      switch (u.prior.kind) {
        case Prior::Kind::Uniform: sd = (u.prior.b - u.prior.a) / 10.0; break;
        case Prior::Kind::Normal: sd = u.prior.b / 2.0; break;
        case Prior::Kind::Gamma: sd = std::sqrt(u.prior.a) / u.prior.b / 2.0; break;
        default: sd = 1.0;
      }
    }
    proposal.std_dev.push_back(sd);
  }

  const MCMCChain chain = mh_sample(setup, record, proposal, cfg.mcmc_steps, cfg.seed);
  const ChainSummary summary = summarize(chain, cfg.mcmc_burnin);

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  {
    std::vector<std::string> cols{"step"};
    for (const auto& name : chain.names) cols.push_back(name);
    cols.push_back("loglik");
    cols.push_back("accepted");
    cols.push_back("burnin");
    CsvWriter csv(out_dir / "chain.csv", provenance(cfg), cols);
    for (std::size_t k = 0; k < chain.samples.size(); ++k) {
      std::vector<double> row{static_cast<double>(k)};
      for (double v : chain.samples[k]) row.push_back(v);
      row.push_back(chain.logliks[k]);
      row.push_back(chain.accepted_flags[k] ? 1.0 : 0.0);
      row.push_back(k < static_cast<std::size_t>(chain.n_burnin) ? 1.0 : 0.0);
      csv.row(row);
    }
  }
  {
    json js;
    js["config_digest"] = cfg.digest;
    js["seed"] = cfg.seed;
    js["acceptance_rate"] = summary.acceptance_rate;
    js["n_samples"] = summary.n_samples;
    for (const auto& p : summary.params) {
      json jp;
      jp["mean"] = p.mean;
      jp["std"] = p.stddev;
      jp["q05"] = p.q05;
      jp["q95"] = p.q95;
      jp["hist_edges"] = p.hist_edges;
      jp["hist_counts"] = p.hist_counts;
      js["params"][p.name] = jp;
    }
    for (const auto& ph : summary.pairs) {
      json jp;
      jp["x"] = ph.name_x;
      jp["y"] = ph.name_y;
      jp["edges_x"] = ph.edges_x;
      jp["edges_y"] = ph.edges_y;
      jp["counts"] = ph.counts;
      js["pair_histograms"].push_back(jp);
    }
    std::ofstream out(out_dir / "summary.json");
    out << js.dump(2) << "\n";
  }
  std::printf("acceptance_rate %.4f\n", summary.acceptance_rate);
}

std::vector<std::vector<double>> scan_points(const RunConfig& cfg) {
  if (cfg.scan_grid.empty())
    throw std::invalid_argument("config: this subcommand needs a 'scan' block");
  std::vector<std::vector<double>> axes;
  for (const auto& [name, g] : cfg.scan_grid) {
    std::vector<double> pts;
    for (int i = 0; i < g.points; ++i)
      pts.push_back(g.points == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.points - 1));
    axes.push_back(std::move(pts));
  }
  std::vector<std::vector<double>> out{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out)
      for (double v : axis) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

void cmd_fisher(const CliArgs& args) {
  RunConfig cfg = load(args);
  auto model = make_model(cfg.model_name);
  const auto points = scan_points(cfg);

  std::vector<int> scan_idx;
  for (const auto& [name, g] : cfg.scan_grid) scan_idx.push_back(cfg.theta.index(name));

  std::vector<std::string> cols;
  for (const auto& [name, g] : cfg.scan_grid) cols.push_back(name);
  for (std::size_t i = 0; i < scan_idx.size(); ++i)
    for (std::size_t j = i; j < scan_idx.size(); ++j) {
      cols.push_back("I_" + cfg.scan_grid[i].first + "_" + cfg.scan_grid[j].first);
      cols.push_back("se_" + cfg.scan_grid[i].first + "_" + cfg.scan_grid[j].first);
    }

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  CsvWriter csv(out_dir / "fisher.csv", provenance(cfg), cols);

  ScoreOptions opts;
  if (cfg.initial != "default") opts.initial = initial_state_for(cfg, *model);

  for (std::size_t p = 0; p < points.size(); ++p) {
    ParameterVector theta = cfg.theta;
    for (std::size_t a = 0; a < scan_idx.size(); ++a)
      theta.values[static_cast<std::size_t>(scan_idx[a])] = points[p][a];
    const FisherMatrix fm = estimate_fisher(*model, theta, cfg.T, cfg.dt, cfg.n_traj,
                                            substream_seed(cfg.seed, p), cfg.kind, opts);
    std::vector<double> row = points[p];
    for (std::size_t i = 0; i < scan_idx.size(); ++i)
      for (std::size_t j = i; j < scan_idx.size(); ++j) {
        row.push_back(fm(scan_idx[i], scan_idx[j]));
        row.push_back(fm.se(scan_idx[i], scan_idx[j]));
      }
    csv.row(row);
  }
  std::cout << "fisher scan written to " << (out_dir / "fisher.csv").string() << "\n";
}

void cmd_entropy(const CliArgs& args) {
  RunConfig cfg = load(args);
  auto model = make_model(cfg.model_name);
  if (cfg.model_name != "two_level")
    throw std::invalid_argument("entropy scan is defined for the two_level model");
  const auto points = scan_points(cfg);

  std::vector<std::string> cols;
  for (const auto& [name, g] : cfg.scan_grid) cols.push_back(name);
  cols.push_back("relative_entropy");
  cols.push_back("se");

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  CsvWriter csv(out_dir / "entropy.csv", provenance(cfg), cols);

  for (std::size_t p = 0; p < points.size(); ++p) {
    ParameterVector theta = cfg.theta;
    for (std::size_t a = 0; a < cfg.scan_grid.size(); ++a)
      theta.set(cfg.scan_grid[a].first, points[p][a]);
    const double lambda_st = stationary_emission_rate(theta);
    std::vector<double> row = points[p];
    if (lambda_st > 0.0) {
      auto [s, se] = relative_entropy(*model, theta, lambda_st, cfg.T, cfg.dt,
                                      cfg.n_traj, substream_seed(cfg.seed, p));
      row.push_back(s);
      row.push_back(se);
    } else {
      // No driving: the record is empty and coincides with the rate-0
      // reference process.
      row.push_back(0.0);
      row.push_back(0.0);
    }
    csv.row(row);
  }
  std::cout << "entropy scan written to " << (out_dir / "entropy.csv").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and Bayesian inference for continuously monitored "
               "open quantum systems"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the common options after the subcommand too

  CliArgs args;
  app.add_option("--config", args.config_path, "JSON config file")->required();
  app.add_option("--record", args.record_path, "measurement record file");
  app.add_option("--out", args.out_dir, "output directory");
  std::uint64_t seed_override = 0;
  auto* seed_opt = app.add_option("--seed", seed_override, "override config seed");

  auto* sim = app.add_subcommand("simulate", "generate a measurement record");
  auto* ll = app.add_subcommand("loglik", "log-likelihood of a record");
  auto* post = app.add_subcommand("posterior", "grid posterior over unknowns");
  auto* mcmc = app.add_subcommand("mcmc", "Metropolis-Hastings posterior sampling");
  auto* fisher = app.add_subcommand("fisher", "Monte Carlo Fisher-information scan");
  auto* entropy = app.add_subcommand("entropy", "relative-entropy scan");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) args.seed = seed_override;

  try {
    if (sim->parsed()) cmd_simulate(args);
    else if (ll->parsed()) cmd_loglik(args);
    else if (post->parsed()) cmd_posterior(args);
    else if (mcmc->parsed()) cmd_mcmc(args);
    else if (fisher->parsed()) cmd_fisher(args);
    else if (entropy->parsed()) cmd_entropy(args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
