#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfilter/bayes.hpp"
#include "qfilter/record.hpp"

namespace qfilter {

// On-disk record: one JSON object with the measurement data plus
// provenance (generating model/theta/seed when synthetic).
struct RecordFile {
  Record record;
  std::string model;
  std::optional<ParameterVector> theta;
  std::optional<std::uint64_t> seed;
  std::string config_digest;
};

void save_record(const std::filesystem::path& path, const RecordFile& rf);
RecordFile load_record(const std::filesystem::path& path);

// FNV-1a 64 over the canonical (sorted-key, compact) JSON dump.
std::string config_digest(const std::string& canonical_text);

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int points = 1;
};

struct UnknownSpec {
  std::string name;
  Prior prior;
  std::optional<GridSpec> grid;
  std::optional<double> proposal_std;
};

// Parsed and validated CLI configuration.
struct RunConfig {
  std::string model_name;
  ParameterVector theta;
  Measurement kind = Measurement::Jump;
  double T = 1.0;
  double dt = 0.01;
  double lambda_ref = 1.0;
  std::uint64_t seed = 0;
  std::string initial = "default";  // default | ground | excited
  bool bimodal_truth = false;       // simulate hidden config jumps explicitly

  std::vector<UnknownSpec> unknowns;

  // simulate
  std::vector<double> state_times;
  double bin_width = 0.0;  // > 0 enables the binned-count CSV

  // posterior evolution snapshots
  std::vector<double> posterior_times;

  // loglik trajectory output interval (0 = final value only)
  double loglik_snapshot_step = 0.0;

  // mcmc
  std::int64_t mcmc_steps = 10000;
  std::int64_t mcmc_burnin = 1000;

  // fisher / entropy
  int n_traj = 200;
  std::vector<std::pair<std::string, GridSpec>> scan_grid;

  std::string digest;  // of the config file contents

  // Throws std::invalid_argument with a readable message on bad input.
  void validate() const;
};

RunConfig load_config(const std::filesystem::path& path);

// Writes CSV with '#' provenance comments (digest, seed) before the
// header row.  Values are printed with 17 significant digits so output
// is byte-stable for identical inputs.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::pair<std::string, std::string>>& provenance,
            const std::vector<std::string>& columns);
  ~CsvWriter();

  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

DensityMatrix initial_state_for(const RunConfig& cfg, const ParametricModel& model);

}  // namespace qfilter
