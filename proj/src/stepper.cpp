#include "qfilter/stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace qfilter {

namespace {

// S += coeff * (rho -> X rho Y) in vec(rho) coordinates:
// S[(i,j),(a,b)] += coeff * X(i,a) * Y(b,j).
void add_sandwich(CMat& s, const CMat& x, const CMat& y, cplx coeff) {
  const int d = x.dim();
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a) {
      const cplx xia = coeff * x(i, a);
      if (xia == cplx{0.0, 0.0}) continue;
      for (int j = 0; j < d; ++j)
        for (int b = 0; b < d; ++b) s(i * d + j, a * d + b) += xia * y(b, j);
    }
}

void add_left(CMat& s, const CMat& x, cplx coeff) {
  add_sandwich(s, x, CMat::identity(x.dim()), coeff);
}

void add_right(CMat& s, const CMat& y, cplx coeff) {
  add_sandwich(s, CMat::identity(y.dim()), y, coeff);
}

// Drift generator A0 as a superoperator: -i[H, .] - {c†c, .}/2 plus the
// hidden-channel dissipators, and for diffusion records also c . c†.
CMat drift_generator(const OperatorSet& ops, Measurement kind) {
  const int d = ops.dim;
  CMat a(d * d);
  const cplx mi{0.0, -1.0};
  add_left(a, ops.H, mi);
  add_right(a, ops.H, -mi);
  const CMat ctc = ops.c.adjoint() * ops.c;
  add_left(a, ctc, -0.5);
  add_right(a, ctc, -0.5);
  for (const auto& j : ops.hidden) {
    add_sandwich(a, j, j.adjoint(), 1.0);
    const CMat jtj = j.adjoint() * j;
    add_left(a, jtj, -0.5);
    add_right(a, jtj, -0.5);
  }
  if (kind == Measurement::Diffusion) add_sandwich(a, ops.c, ops.c.adjoint(), 1.0);
  return a;
}

// d_i A0 given (d_i H, d_i c); hidden channels are theta-independent in
// the model interface.
CMat drift_generator_derivative(const OperatorSet& ops, const CMat& dh,
                                const CMat& dc, Measurement kind) {
  const int d = ops.dim;
  CMat a(d * d);
  const cplx mi{0.0, -1.0};
  add_left(a, dh, mi);
  add_right(a, dh, -mi);
  const CMat dctc = dc.adjoint() * ops.c + ops.c.adjoint() * dc;
  add_left(a, dctc, -0.5);
  add_right(a, dctc, -0.5);
  if (kind == Measurement::Diffusion) {
    add_sandwich(a, dc, ops.c.adjoint(), 1.0);
    add_sandwich(a, ops.c, dc.adjoint(), 1.0);
  }
  return a;
}

double real_trace(int d, const cplx* v) {
  double t = 0.0;
  for (int i = 0; i < d; ++i) t += v[i * d + i].real();
  return t;
}

void hermitize_scale(int d, const cplx* src, double inv, cplx* dst) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      dst[i * d + j] = 0.5 * inv * (src[i * d + j] + std::conj(src[j * d + i]));
}

}  // namespace

FilterStepper::FilterStepper(const OperatorSet& ops, double dt, Measurement kind)
    : d_(ops.dim),
      dt_(dt),
      kind_(kind),
      drift_(CMat::identity(ops.dim * ops.dim)),
      click_(ops.dim * ops.dim),
      diff_(ops.dim * ops.dim),
      ctc_(ops.c.adjoint() * ops.c),
      c_(ops.c),
      scratch_(2 * static_cast<std::size_t>(ops.dim) * ops.dim) {
  if (!(dt > 0.0)) throw std::invalid_argument("FilterStepper: dt must be positive");
  ops.validate();

  CMat a0 = drift_generator(ops, kind);
  a0 *= cplx{dt, 0.0};
  drift_ += a0;
  add_sandwich(click_, ops.c, ops.c.adjoint(), 1.0);
  add_sandwich(diff_, ops.c, CMat::identity(d_), 1.0);
  add_right(diff_, ops.c.adjoint(), 1.0);
}

void FilterStepper::to_vec(const CMat& m, cplx* v) {
  std::copy(m.data(), m.data() + m.size(), v);
}

CMat FilterStepper::to_mat(int dim, const cplx* v) {
  CMat m(dim);
  std::copy(v, v + static_cast<std::size_t>(dim) * dim, m.data());
  return m;
}

double FilterStepper::renormalize_from_scratch(cplx* v) {
  const double tr = real_trace(d_, scratch_.data());
  if (!(tr > 0.0)) return kImpossible;
  hermitize_scale(d_, scratch_.data(), 1.0 / tr, v);
  return std::log(tr);
}

double FilterStepper::deterministic_step(cplx* v) {
  kernels::cmatvec(static_cast<std::size_t>(vdim()), drift_.data(), v,
                   scratch_.data());
  return renormalize_from_scratch(v);
}

double FilterStepper::click_step(cplx* v) {
  kernels::cmatvec(static_cast<std::size_t>(vdim()), click_.data(), v,
                   scratch_.data());
  return renormalize_from_scratch(v);
}

double FilterStepper::diffusion_step(cplx* v, double dy) {
  const auto n = static_cast<std::size_t>(vdim());
  cplx* s = scratch_.data();
  cplx* t = scratch_.data() + n;
  kernels::cmatvec(n, drift_.data(), v, s);
  kernels::cmatvec(n, diff_.data(), v, t);
  kernels::caxpy(n, cplx{dy, 0.0}, t, s);
  return renormalize_from_scratch(v);
}

double FilterStepper::emission_rate(const cplx* v) const {
  return kernels::ctrace_prod(static_cast<std::size_t>(d_), ctc_.data(),
                              reinterpret_cast<const cplx*>(v))
      .real();
}

double FilterStepper::homodyne_mean(const cplx* v) const {
  // tr(c rho + rho c†) = 2 Re tr(c rho)
  return 2.0 *
         kernels::ctrace_prod(static_cast<std::size_t>(d_), c_.data(), v).real();
}

// ---------------------------------------------------------------------------

TangentStepper::TangentStepper(const ParametricModel& model,
                               const ParameterVector& theta, double dt,
                               Measurement kind)
    : filter_(model.build(theta), dt, kind) {
  const OperatorSet ops = model.build(theta);
  const int n = static_cast<int>(theta.size());
  const int d = ops.dim;
  for (int i = 0; i < n; ++i) {
    auto [dh, dc] = model.derivative(theta, i);
    CMat da = drift_generator_derivative(ops, dh, dc, kind);
    da *= cplx{dt, 0.0};
    ddrift_.push_back(std::move(da));

    CMat dk(d * d);
    add_sandwich(dk, dc, ops.c.adjoint(), 1.0);
    add_sandwich(dk, ops.c, dc.adjoint(), 1.0);
    dclick_.push_back(std::move(dk));

    CMat dm(d * d);
    add_sandwich(dm, dc, CMat::identity(d), 1.0);
    add_right(dm, dc.adjoint(), 1.0);
    ddiff_.push_back(std::move(dm));
  }
  vs_.resize(static_cast<std::size_t>(filter_.vdim()));
  ts_.resize(static_cast<std::size_t>(filter_.vdim()) * (n + 1));
}

double TangentStepper::rescale(cplx* v, cplx* tangents) {
  const int d = filter_.dim();
  const auto n = static_cast<std::size_t>(filter_.vdim());
  const double tr = real_trace(d, vs_.data());
  if (!(tr > 0.0)) return FilterStepper::kImpossible;
  const double inv = 1.0 / tr;
  hermitize_scale(d, vs_.data(), inv, v);
  for (int i = 0; i < n_params(); ++i)
    hermitize_scale(d, ts_.data() + i * n, inv, tangents + i * n);
  return std::log(tr);
}

double TangentStepper::deterministic_step(cplx* v, cplx* tangents) {
  const auto n = static_cast<std::size_t>(filter_.vdim());
  kernels::cmatvec(n, filter_.drift_.data(), v, vs_.data());
  cplx* tmp = ts_.data() + static_cast<std::size_t>(n_params()) * n;
  for (int i = 0; i < n_params(); ++i) {
    cplx* out = ts_.data() + i * n;
    kernels::cmatvec(n, filter_.drift_.data(), tangents + i * n, out);
    kernels::cmatvec(n, ddrift_[static_cast<std::size_t>(i)].data(), v, tmp);
    kernels::caxpy(n, cplx{1.0, 0.0}, tmp, out);
  }
  return rescale(v, tangents);
}

double TangentStepper::click_step(cplx* v, cplx* tangents) {
  const auto n = static_cast<std::size_t>(filter_.vdim());
  kernels::cmatvec(n, filter_.click_.data(), v, vs_.data());
  cplx* tmp = ts_.data() + static_cast<std::size_t>(n_params()) * n;
  for (int i = 0; i < n_params(); ++i) {
    cplx* out = ts_.data() + i * n;
    kernels::cmatvec(n, filter_.click_.data(), tangents + i * n, out);
    kernels::cmatvec(n, dclick_[static_cast<std::size_t>(i)].data(), v, tmp);
    kernels::caxpy(n, cplx{1.0, 0.0}, tmp, out);
  }
  return rescale(v, tangents);
}

double TangentStepper::diffusion_step(cplx* v, cplx* tangents, double dy) {
  const auto n = static_cast<std::size_t>(filter_.vdim());
  const cplx dyc{dy, 0.0};
  cplx* tmp = ts_.data() + static_cast<std::size_t>(n_params()) * n;

  kernels::cmatvec(n, filter_.drift_.data(), v, vs_.data());
  kernels::cmatvec(n, filter_.diff_.data(), v, tmp);
  kernels::caxpy(n, dyc, tmp, vs_.data());

  for (int i = 0; i < n_params(); ++i) {
    cplx* out = ts_.data() + i * n;
    kernels::cmatvec(n, filter_.drift_.data(), tangents + i * n, out);
    kernels::cmatvec(n, filter_.diff_.data(), tangents + i * n, tmp);
    kernels::caxpy(n, dyc, tmp, out);
    kernels::cmatvec(n, ddrift_[static_cast<std::size_t>(i)].data(), v, tmp);
    kernels::caxpy(n, cplx{1.0, 0.0}, tmp, out);
    kernels::cmatvec(n, ddiff_[static_cast<std::size_t>(i)].data(), v, tmp);
    kernels::caxpy(n, dyc, tmp, out);
  }
  return rescale(v, tangents);
}

double TangentStepper::score(const cplx* tangents, int i) const {
  const int d = filter_.dim();
  return real_trace(d, tangents + static_cast<std::size_t>(i) * filter_.vdim());
}

}  // namespace qfilter
