#include "qfilter/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qfilter/model.hpp"

namespace qfilter {

using nlohmann::json;

namespace {

json record_to_json(const RecordFile& rf) {
  json j;
  if (const auto* jump = std::get_if<JumpRecord>(&rf.record)) {
    j["kind"] = "jump";
    j["T"] = jump->T;
    j["dt"] = jump->dt;
    j["clicks"] = jump->clicks;
  } else {
    const auto& diff = std::get<DiffusionRecord>(rf.record);
    j["kind"] = "diffusion";
    j["T"] = diff.T;
    j["dt"] = diff.dt;
    j["dy"] = diff.dy;
  }
  j["model"] = rf.model;
  if (rf.theta) {
    json theta;
    for (std::size_t i = 0; i < rf.theta->names.size(); ++i)
      theta[rf.theta->names[i]] = rf.theta->values[i];
    j["theta"] = theta;
  }
  if (rf.seed) j["seed"] = *rf.seed;
  if (!rf.config_digest.empty()) j["config_digest"] = rf.config_digest;
  return j;
}

}  // namespace

void save_record(const std::filesystem::path& path, const RecordFile& rf) {
  validate(rf.record);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << record_to_json(rf).dump() << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

RecordFile load_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  in >> j;

  RecordFile rf;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "jump") {
    JumpRecord r;
    r.T = j.at("T").get<double>();
    r.dt = j.at("dt").get<double>();
    r.clicks = j.at("clicks").get<std::vector<double>>();
    rf.record = std::move(r);
  } else if (kind == "diffusion") {
    DiffusionRecord r;
    r.T = j.at("T").get<double>();
    r.dt = j.at("dt").get<double>();
    r.dy = j.at("dy").get<std::vector<double>>();
    rf.record = std::move(r);
  } else {
    throw std::invalid_argument("record file: unknown kind '" + kind + "'");
  }
  validate(rf.record);

  rf.model = j.value("model", std::string{});
  if (j.contains("theta")) {
    ParameterVector theta;
    if (rf.model.empty())
      throw std::invalid_argument("record file: theta without model name");
    auto model = make_model(rf.model);
    theta.names = model->parameter_names();
    for (const auto& name : theta.names)
      theta.values.push_back(j.at("theta").at(name).get<double>());
    rf.theta = std::move(theta);
  }
  if (j.contains("seed")) rf.seed = j.at("seed").get<std::uint64_t>();
  rf.config_digest = j.value("config_digest", std::string{});
  return rf;
}

std::string config_digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Prior parse_prior(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform") return Prior::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (type == "normal") return Prior::normal(j.at("mu").get<double>(), j.at("sigma").get<double>());
  if (type == "gamma") return Prior::gamma(j.at("shape").get<double>(), j.at("rate").get<double>());
  throw std::invalid_argument("config: unknown prior type '" + type + "'");
}

GridSpec parse_grid(const json& j) {
  GridSpec g;
  g.lo = j.at("lo").get<double>();
  g.hi = j.at("hi").get<double>();
  g.points = j.at("points").get<int>();
  if (g.points < 1 || !(g.lo <= g.hi))
    throw std::invalid_argument("config: bad grid spec");
  return g;
}

std::vector<double> parse_times(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  // {"step": s, "until": T} shorthand
  std::vector<double> times;
  const double step = j.at("step").get<double>();
  const double until = j.at("until").get<double>();
  for (double t = 0.0; t <= until + 1e-12; t += step) times.push_back(t);
  return times;
}

}  // namespace

void RunConfig::validate() const {
  theta.validate();
  auto model = make_model(model_name);
  if (theta.names != model->parameter_names())
    throw std::invalid_argument("config: theta does not match model '" + model_name + "' parameters");
  if (!(dt > 0.0) || !(T >= dt))
    throw std::invalid_argument("config: need dt > 0 and T >= dt");
  if (!(lambda_ref > 0.0))
    throw std::invalid_argument("config: lambda_ref must be positive");
  if (initial != "default" && initial != "ground" && initial != "excited")
    throw std::invalid_argument("config: initial must be default|ground|excited");
  if ((initial == "ground" || initial == "excited") && model->dim() != 2)
    throw std::invalid_argument("config: named initial states are two-level only");
  if (bimodal_truth && model_name != "bimodal")
    throw std::invalid_argument("config: bimodal_truth requires the bimodal model");
  for (const auto& u : unknowns) (void)theta.index(u.name);
  for (const auto& [name, grid] : scan_grid) (void)theta.index(name);
  if (mcmc_steps < 1 || mcmc_burnin < 0 || mcmc_burnin >= mcmc_steps)
    throw std::invalid_argument("config: mcmc needs steps >= 1 and 0 <= burnin < steps");
  if (n_traj < 2) throw std::invalid_argument("config: n_traj must be >= 2");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config: JSON parse error: " + std::string(e.what()));
  }

  RunConfig cfg;
  try {
    cfg.model_name = j.at("model").get<std::string>();
    auto model = make_model(cfg.model_name);
    cfg.theta.names = model->parameter_names();
    for (const auto& name : cfg.theta.names)
      cfg.theta.values.push_back(j.at("theta").at(name).get<double>());

    cfg.kind = measurement_from_string(j.value("measurement", std::string{"jump"}));
    cfg.T = j.at("T").get<double>();
    cfg.dt = j.value("dt", 0.01);
    cfg.lambda_ref = j.value("lambda_ref", 1.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.initial = j.value("initial", std::string{"default"});
    cfg.bimodal_truth = j.value("bimodal_truth", false);

    if (j.contains("unknowns")) {
      for (const auto& [name, spec] : j.at("unknowns").items()) {
        UnknownSpec u;
        u.name = name;
        u.prior = parse_prior(spec.at("prior"));
        if (spec.contains("grid")) u.grid = parse_grid(spec.at("grid"));
        if (spec.contains("proposal_std"))
          u.proposal_std = spec.at("proposal_std").get<double>();
        cfg.unknowns.push_back(std::move(u));
      }
    }

    if (j.contains("simulate")) {
      const auto& s = j.at("simulate");
      if (s.contains("state_times")) cfg.state_times = parse_times(s.at("state_times"));
      cfg.bin_width = s.value("bin_width", 0.0);
    }
    if (j.contains("posterior") && j.at("posterior").contains("times"))
      cfg.posterior_times = parse_times(j.at("posterior").at("times"));
    if (j.contains("loglik"))
      cfg.loglik_snapshot_step = j.at("loglik").value("snapshot_step", 0.0);
    if (j.contains("mcmc")) {
      cfg.mcmc_steps = j.at("mcmc").value("steps", std::int64_t{10000});
      cfg.mcmc_burnin = j.at("mcmc").value("burnin", std::int64_t{1000});
    }
    if (j.contains("scan")) {
      cfg.n_traj = j.at("scan").value("n_traj", 200);
      for (const auto& [name, spec] : j.at("scan").at("grid").items())
        cfg.scan_grid.emplace_back(name, parse_grid(spec));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }

  cfg.digest = config_digest(j.dump());
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------

struct CsvWriter::Impl {
  std::ofstream out;
  std::filesystem::path path;
};

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& provenance,
                     const std::vector<std::string>& columns)
    : impl_(new Impl{std::ofstream(path), path}) {
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  for (const auto& [k, v] : provenance) impl_->out << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    impl_->out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    impl_->out << buf << (i + 1 < values.size() ? "," : "\n");
  }
}

void CsvWriter::raw_row(const std::string& line) { impl_->out << line << "\n"; }

DensityMatrix initial_state_for(const RunConfig& cfg, const ParametricModel& model) {
  if (cfg.initial == "ground") return ground_state();
  if (cfg.initial == "excited") return excited_state();
  return model.initial_state(cfg.theta);
}

}  // namespace qfilter
