#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qfilter/quantum.hpp"

namespace qfilter {

// Named parameter values, order fixed by the owning model.
struct ParameterVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  int index(const std::string& name) const;
  double get(const std::string& name) const;
  void set(const std::string& name, double v);
  void validate() const;
};

// Mapping theta -> (H, c, hidden Lindblad operators) together with the
// parameter derivatives of H and c.  Models are immutable; build and
// derivative are pure.
class ParametricModel {
 public:
  virtual ~ParametricModel() = default;

  virtual int dim() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  virtual std::string name() const = 0;

  // True when theta lies in the model's parameter domain (e.g. rates
  // positive).  Out-of-domain thetas make build throw.
  virtual bool in_domain(const ParameterVector& theta) const = 0;

  virtual OperatorSet build(const ParameterVector& theta) const = 0;

  // (d_i H, d_i c) for parameter index i.
  virtual std::pair<CMat, CMat> derivative(const ParameterVector& theta,
                                           int i) const = 0;

  virtual DensityMatrix initial_state(const ParameterVector& theta) const = 0;

 protected:
  void check_theta(const ParameterVector& theta) const;
};

// Driven, decaying two-level atom: H = (Omega/2) sx + (Delta/2) sz,
// c = sqrt(gamma) sigma-.  Parameters (Omega, Delta, gamma).
class TwoLevelModel final : public ParametricModel {
 public:
  int dim() const override { return 2; }
  std::vector<std::string> parameter_names() const override {
    return {"Omega", "Delta", "gamma"};
  }
  std::string name() const override { return "two_level"; }
  bool in_domain(const ParameterVector& theta) const override;
  OperatorSet build(const ParameterVector& theta) const override;
  std::pair<CMat, CMat> derivative(const ParameterVector& theta, int i) const override;
  DensityMatrix initial_state(const ParameterVector& theta) const override;
};

// Two-level atom whose drive parameters jump between two classical
// configurations a and b.  Hilbert space atom (x) config, dim 4.
// Parameters (Omega_a, Delta_a, gamma_a, Omega_b, Delta_b, gamma_b,
// W_ab, W_ba).
class BimodalModel final : public ParametricModel {
 public:
  int dim() const override { return 4; }
  std::vector<std::string> parameter_names() const override {
    return {"Omega_a", "Delta_a", "gamma_a", "Omega_b",
            "Delta_b", "gamma_b", "W_ab",    "W_ba"};
  }
  std::string name() const override { return "bimodal"; }
  bool in_domain(const ParameterVector& theta) const override;
  OperatorSet build(const ParameterVector& theta) const override;
  std::pair<CMat, CMat> derivative(const ParameterVector& theta, int i) const override;
  DensityMatrix initial_state(const ParameterVector& theta) const override;

  // Stationary occupation (p_a, p_b) of the configuration chain; p_a = 1
  // when both rates vanish.
  static std::pair<double, double> stationary_config(double w_ab, double w_ba);

  // Per-configuration two-level operators, used by the ground-truth
  // generator.
  OperatorSet config_operators(const ParameterVector& theta, int config) const;
};

ParameterVector make_theta(const ParametricModel& model,
                           const std::vector<double>& values);

std::unique_ptr<ParametricModel> make_model(const std::string& name);

// lambda_st = Omega^2 gamma / (gamma^2 + 4 Delta^2 + 2 Omega^2).
double stationary_emission_rate(double omega, double delta, double gamma);
double stationary_emission_rate(const ParameterVector& theta);

}  // namespace qfilter
