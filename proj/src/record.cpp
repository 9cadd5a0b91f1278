#include "qfilter/record.hpp"

#include <stdexcept>

namespace qfilter {

std::string to_string(Measurement kind) {
  return kind == Measurement::Jump ? "jump" : "diffusion";
}

Measurement measurement_from_string(const std::string& s) {
  if (s == "jump") return Measurement::Jump;
  if (s == "diffusion") return Measurement::Diffusion;
  throw std::invalid_argument("unknown measurement kind: " + s);
}

std::vector<std::int64_t> JumpRecord::click_steps() const {
  std::vector<std::int64_t> steps;
  steps.reserve(clicks.size());
  for (double t : clicks) steps.push_back(static_cast<std::int64_t>(std::llround(t / dt)));
  return steps;
}

void JumpRecord::validate() const {
  if (!(dt > 0.0) || !(T >= dt))
    throw std::invalid_argument("JumpRecord: need dt > 0 and T >= dt");
  std::int64_t prev = -1;
  for (double t : clicks) {
    if (!(t >= 0.0) || !(t < T))
      throw std::invalid_argument("JumpRecord: click outside [0, T)");
    const std::int64_t step = static_cast<std::int64_t>(std::llround(t / dt));
    if (std::abs(t - static_cast<double>(step) * dt) > 1e-9 * dt)
      throw std::invalid_argument("JumpRecord: click not on the time grid");
    if (step <= prev)
      throw std::invalid_argument("JumpRecord: clicks must be strictly increasing, one per step");
    prev = step;
  }
}

JumpRecord JumpRecord::truncated(double t) const {
  JumpRecord r{t, dt, {}};
  for (double c : clicks)
    if (c < t) r.clicks.push_back(c);
  return r;
}

void DiffusionRecord::validate() const {
  if (!(dt > 0.0) || !(T >= dt))
    throw std::invalid_argument("DiffusionRecord: need dt > 0 and T >= dt");
  if (static_cast<std::int64_t>(dy.size()) != n_steps())
    throw std::invalid_argument("DiffusionRecord: dy length inconsistent with T/dt");
}

DiffusionRecord DiffusionRecord::truncated(double t) const {
  DiffusionRecord r{t, dt, {}};
  const auto n = static_cast<std::size_t>(step_count(t, dt));
  r.dy.assign(dy.begin(), dy.begin() + std::min(n, dy.size()));
  return r;
}

Measurement record_kind(const Record& record) {
  return std::holds_alternative<JumpRecord>(record) ? Measurement::Jump
                                                    : Measurement::Diffusion;
}

void validate(const Record& record) {
  std::visit([](const auto& r) { r.validate(); }, record);
}

}  // namespace qfilter
