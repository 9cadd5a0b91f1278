#include "qfilter/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qfilter {

int ParameterVector::index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw std::invalid_argument("ParameterVector: unknown parameter " + name);
  return static_cast<int>(it - names.begin());
}

double ParameterVector::get(const std::string& name) const {
  return values[static_cast<std::size_t>(index(name))];
}

void ParameterVector::set(const std::string& name, double v) {
  values[static_cast<std::size_t>(index(name))] = v;
}

void ParameterVector::validate() const {
  if (names.size() != values.size() || names.empty())
    throw std::invalid_argument("ParameterVector: names/values size mismatch");
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j])
        throw std::invalid_argument("ParameterVector: duplicate name " + names[i]);
}

void ParametricModel::check_theta(const ParameterVector& theta) const {
  theta.validate();
  if (theta.names != parameter_names())
    throw std::invalid_argument("model " + name() + ": unexpected parameter names");
  if (!in_domain(theta))
    throw std::invalid_argument("model " + name() + ": theta outside domain");
}

// ---------------------------------------------------------------------------
// two-level atom

bool TwoLevelModel::in_domain(const ParameterVector& theta) const {
  return theta.values.size() == 3 && theta.values[2] > 0.0 &&
         std::isfinite(theta.values[0]) && std::isfinite(theta.values[1]) &&
         std::isfinite(theta.values[2]);
}

OperatorSet TwoLevelModel::build(const ParameterVector& theta) const {
  check_theta(theta);
  const double omega = theta.values[0], delta = theta.values[1],
               gamma = theta.values[2];
  OperatorSet ops;
  ops.dim = 2;
  ops.H = 0.5 * omega * sigma_x() + 0.5 * delta * sigma_z();
  ops.c = std::sqrt(gamma) * sigma_minus();
  return ops;
}

std::pair<CMat, CMat> TwoLevelModel::derivative(const ParameterVector& theta,
                                                int i) const {
  check_theta(theta);
  CMat dh = CMat::zero(2), dc = CMat::zero(2);
  switch (i) {
    case 0: dh = 0.5 * sigma_x(); break;
    case 1: dh = 0.5 * sigma_z(); break;
    case 2: dc = (0.5 / std::sqrt(theta.values[2])) * sigma_minus(); break;
    default: throw std::out_of_range("two_level: parameter index");
  }
  return {dh, dc};
}

DensityMatrix TwoLevelModel::initial_state(const ParameterVector&) const {
  return ground_state();
}

// ---------------------------------------------------------------------------
// bimodal two-level atom

namespace {

CMat config_proj(int config) {
  CMat p = CMat::zero(2);
  p(config, config) = 1.0;
  return p;
}

CMat config_flip(int from, int to) {
  CMat p = CMat::zero(2);
  p(to, from) = 1.0;
  return p;
}

}  // namespace

bool BimodalModel::in_domain(const ParameterVector& theta) const {
  if (theta.values.size() != 8) return false;
  for (double v : theta.values)
    if (!std::isfinite(v)) return false;
  const double gamma_a = theta.values[2], gamma_b = theta.values[5];
  const double w_ab = theta.values[6], w_ba = theta.values[7];
  return gamma_a > 0.0 && gamma_b > 0.0 && w_ab >= 0.0 && w_ba >= 0.0;
}

OperatorSet BimodalModel::build(const ParameterVector& theta) const {
  check_theta(theta);
  const double* v = theta.values.data();
  const double w_ab = v[6], w_ba = v[7];

  OperatorSet ops;
  ops.dim = 4;
  CMat ha = 0.5 * v[0] * sigma_x() + 0.5 * v[1] * sigma_z();
  CMat hb = 0.5 * v[3] * sigma_x() + 0.5 * v[4] * sigma_z();
  ops.H = kron(ha, config_proj(0)) + kron(hb, config_proj(1));

  CMat gproj = std::sqrt(v[2]) * config_proj(0) + std::sqrt(v[5]) * config_proj(1);
  ops.c = kron(sigma_minus(), gproj);

  ops.hidden.push_back(std::sqrt(w_ab) * kron(CMat::identity(2), config_flip(0, 1)));
  ops.hidden.push_back(std::sqrt(w_ba) * kron(CMat::identity(2), config_flip(1, 0)));
  return ops;
}

std::pair<CMat, CMat> BimodalModel::derivative(const ParameterVector& theta,
                                               int i) const {
  check_theta(theta);
  const double* v = theta.values.data();
  CMat dh = CMat::zero(4), dc = CMat::zero(4);
  switch (i) {
    case 0: dh = kron(0.5 * sigma_x(), config_proj(0)); break;
    case 1: dh = kron(0.5 * sigma_z(), config_proj(0)); break;
    case 2:
      dc = kron(sigma_minus(), (0.5 / std::sqrt(v[2])) * config_proj(0));
      break;
    case 3: dh = kron(0.5 * sigma_x(), config_proj(1)); break;
    case 4: dh = kron(0.5 * sigma_z(), config_proj(1)); break;
    case 5:
      dc = kron(sigma_minus(), (0.5 / std::sqrt(v[5])) * config_proj(1));
      break;
    case 6:
    case 7:
      // Configuration-jump rates enter only through the hidden channels.
      break;
    default: throw std::out_of_range("bimodal: parameter index");
  }
  return {dh, dc};
}

std::pair<double, double> BimodalModel::stationary_config(double w_ab, double w_ba) {
  const double total = w_ab + w_ba;
  if (total <= 0.0) return {1.0, 0.0};
  return {w_ba / total, w_ab / total};
}

DensityMatrix BimodalModel::initial_state(const ParameterVector& theta) const {
  check_theta(theta);
  auto [pa, pb] = stationary_config(theta.values[6], theta.values[7]);
  CMat cfg = CMat::zero(2);
  cfg(0, 0) = pa;
  cfg(1, 1) = pb;
  return DensityMatrix{kron(ground_state().mat, cfg)};
}

OperatorSet BimodalModel::config_operators(const ParameterVector& theta,
                                           int config) const {
  check_theta(theta);
  const double* v = theta.values.data();
  const int off = config == 0 ? 0 : 3;
  OperatorSet ops;
  ops.dim = 2;
  ops.H = 0.5 * v[off] * sigma_x() + 0.5 * v[off + 1] * sigma_z();
  ops.c = std::sqrt(v[off + 2]) * sigma_minus();
  return ops;
}

// ---------------------------------------------------------------------------

ParameterVector make_theta(const ParametricModel& model,
                           const std::vector<double>& values) {
  ParameterVector theta{model.parameter_names(), values};
  theta.validate();
  return theta;
}

std::unique_ptr<ParametricModel> make_model(const std::string& name) {
  if (name == "two_level") return std::make_unique<TwoLevelModel>();
  if (name == "bimodal") return std::make_unique<BimodalModel>();
  throw std::invalid_argument("unknown model: " + name);
}

double stationary_emission_rate(double omega, double delta, double gamma) {
  if (gamma <= 0.0)
    throw std::invalid_argument("stationary_emission_rate: gamma must be positive");
  return omega * omega * gamma /
         (gamma * gamma + 4.0 * delta * delta + 2.0 * omega * omega);
}

double stationary_emission_rate(const ParameterVector& theta) {
  return stationary_emission_rate(theta.get("Omega"), theta.get("Delta"),
                                  theta.get("gamma"));
}

}  // namespace qfilter
