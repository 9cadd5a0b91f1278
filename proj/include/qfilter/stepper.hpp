#pragma once

#include <limits>
#include <vector>

#include "qfilter/model.hpp"
#include "qfilter/quantum.hpp"
#include "qfilter/record.hpp"

namespace qfilter {

// One fixed-dt step of the measurement filter, shared by the record
// generator and the likelihood replay so that replaying a record under
// the generating theta reproduces the generator trajectory bit for bit.
//
// The state is carried as vec(rho), row-major, renormalized to unit
// trace after every step; step functions return log(trace ratio), the
// theta-dependent part of the log-likelihood increment.  The reference
// measure enters the jump log-likelihood only through the closed-form
// offset lambda*dt*(n_steps - N) - N*log(lambda), which the caller adds
// once at the end — handling the exp(lambda dt) factor exactly and
// keeping the lambda-dependence strictly separate from theta, so
// posteriors are exactly invariant under a change of lambda.
//
// A stepper instance owns scratch buffers: use one instance per worker.
class FilterStepper {
 public:
  FilterStepper(const OperatorSet& ops, double dt, Measurement kind);

  int dim() const { return d_; }
  int vdim() const { return d_ * d_; }
  double dt() const { return dt_; }

  static constexpr double kImpossible = -std::numeric_limits<double>::infinity();

  // Jump no-click step.  Returns log(trace ratio), or -inf if the trace
  // ratio is non-positive (v is left unchanged then).
  double deterministic_step(cplx* v);

  // Jump click step: rho -> c rho c† / tr.  Returns log(trace ratio)
  // (= log of the emission rate) or -inf at a zero-probability click.
  double click_step(cplx* v);

  // Diffusion step driven by the recorded increment dy.
  double diffusion_step(cplx* v, double dy);

  // Re tr(c†c rho).
  double emission_rate(const cplx* v) const;
  // Re tr(c rho + rho c†).
  double homodyne_mean(const cplx* v) const;

  static void to_vec(const CMat& m, cplx* v);
  static CMat to_mat(int dim, const cplx* v);

 private:
  friend class TangentStepper;

  double renormalize_from_scratch(cplx* v);

  int d_;
  double dt_;
  Measurement kind_;
  CMat drift_;  // I + dt * A0 as a superoperator
  CMat click_;  // rho -> c rho c†
  CMat diff_;   // rho -> c rho + rho c†
  CMat ctc_;    // c†c (dim d)
  CMat c_;      // c   (dim d)
  std::vector<cplx> scratch_;
};

// Joint propagation of the filter state and the likelihood-tangent
// matrices rho^i = d_i(unnormalized rho) / trace(unnormalized rho).
// After each step trace(tangent[i]) equals d_i of the accumulated
// log-likelihood on the record so far.
class TangentStepper {
 public:
  TangentStepper(const ParametricModel& model, const ParameterVector& theta,
                 double dt, Measurement kind);

  FilterStepper& filter() { return filter_; }
  int n_params() const { return static_cast<int>(ddrift_.size()); }
  int vdim() const { return filter_.vdim(); }

  // tangents: n_params contiguous blocks of vdim() entries.
  double deterministic_step(cplx* v, cplx* tangents);
  double click_step(cplx* v, cplx* tangents);
  double diffusion_step(cplx* v, cplx* tangents, double dy);

  // Re trace of tangent block i.
  double score(const cplx* tangents, int i) const;

 private:
  double rescale(cplx* v, cplx* tangents);

  FilterStepper filter_;
  std::vector<CMat> ddrift_;  // dt * d_i A0
  std::vector<CMat> dclick_;  // rho -> (d_i c) rho c† + c rho (d_i c)†
  std::vector<CMat> ddiff_;   // rho -> (d_i c) rho + rho (d_i c)†
  std::vector<cplx> vs_, ts_;
};

}  // namespace qfilter
