#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qfilter/quantum.hpp"

namespace qfilter {

enum class Measurement { Jump, Diffusion };

std::string to_string(Measurement kind);
Measurement measurement_from_string(const std::string& s);

inline std::int64_t step_count(double T, double dt) {
  return static_cast<std::int64_t>(std::llround(T / dt));
}

// Photon-counting record: click times on the simulation grid.
struct JumpRecord {
  double T = 0.0;
  double dt = 0.0;
  std::vector<double> clicks;  // sorted, multiples of dt, < T

  std::int64_t n_steps() const { return step_count(T, dt); }
  std::vector<std::int64_t> click_steps() const;
  void validate() const;

  // Clicks strictly before time t, with horizon t.
  JumpRecord truncated(double t) const;
};

// Homodyne record: one increment dy per step.
struct DiffusionRecord {
  double T = 0.0;
  double dt = 0.0;
  std::vector<double> dy;

  std::int64_t n_steps() const { return step_count(T, dt); }
  void validate() const;

  DiffusionRecord truncated(double t) const;
};

using Record = std::variant<JumpRecord, DiffusionRecord>;

Measurement record_kind(const Record& record);
void validate(const Record& record);

struct SimOutput {
  Record record;
  // Conditioned states at requested times.
  std::vector<std::pair<double, DensityMatrix>> states;
  // (time, configuration index) for models with explicit hidden jumps;
  // first entry is the initial configuration at t = 0.
  std::vector<std::pair<double, int>> hidden_path;
  // Set when trace(c†c rho) dt exceeded 0.1 at some step.
  bool rate_warning = false;
};

}  // namespace qfilter
