#include "qfilter/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace qfilter {

void DensityMatrix::validate() const {
  if (!mat.is_hermitian(kHermitianTol))
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(mat.trace() - cplx{1.0, 0.0}) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace != 1");
  for (double ev : hermitian_eigenvalues(mat))
    if (ev < -kEigenTol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

void OperatorSet::validate() const {
  if (H.dim() != dim || c.dim() != dim)
    throw std::invalid_argument("OperatorSet: dimension mismatch");
  for (const auto& j : hidden)
    if (j.dim() != dim)
      throw std::invalid_argument("OperatorSet: hidden operator dimension mismatch");
  if (!H.is_hermitian(kHermitianTol))
    throw std::invalid_argument("OperatorSet: H not Hermitian");
}

CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

CMat anticommutator(const CMat& a, const CMat& b) { return a * b + b * a; }

CMat lindblad_dissipator(const CMat& j, const CMat& rho) {
  return j * rho * j.adjoint() - 0.5 * anticommutator(j.adjoint() * j, rho);
}

std::array<double, 3> bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2)
    throw std::invalid_argument("bloch_vector: state must be two-level");
  const cplx* r = rho.mat.data();
  std::array<double, 3> v;
  v[0] = kernels::ctrace_prod(2, r, sigma_x().data()).real();
  v[1] = kernels::ctrace_prod(2, r, sigma_y().data()).real();
  v[2] = kernels::ctrace_prod(2, r, sigma_z().data()).real();
  return v;
}

std::pair<DensityMatrix, double> renormalize(const UnnormalizedState& state) {
  CMat h = state.mat.hermitized();
  const double tr = h.trace().real();
  if (!(tr > 0.0))
    throw std::domain_error("renormalize: non-positive trace");
  h *= cplx{1.0 / tr, 0.0};
  return {DensityMatrix{std::move(h)}, std::log(tr)};
}

const CMat& sigma_x() {
  static const CMat m(2, {0.0, 1.0, 1.0, 0.0});
  return m;
}

const CMat& sigma_y() {
  static const CMat m(2, {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0});
  return m;
}

const CMat& sigma_z() {
  static const CMat m(2, {1.0, 0.0, 0.0, -1.0});
  return m;
}

const CMat& sigma_minus() {
  static const CMat m(2, {0.0, 0.0, 1.0, 0.0});
  return m;
}

DensityMatrix ground_state() {
  return DensityMatrix{CMat(2, {0.0, 0.0, 0.0, 1.0})};
}

DensityMatrix excited_state() {
  return DensityMatrix{CMat(2, {1.0, 0.0, 0.0, 0.0})};
}

DensityMatrix project_psd(const CMat& m) {
  auto [ev, u] = hermitian_eigensystem(m);
  const int n = m.dim();
  double tr = 0.0;
  for (double& e : ev) {
    e = std::max(e, 0.0);
    tr += e;
  }
  if (!(tr > 0.0)) throw std::domain_error("project_psd: non-positive trace");
  CMat out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s{0.0, 0.0};
      for (int k = 0; k < n; ++k)
        s += u(i, k) * ev[static_cast<std::size_t>(k)] * std::conj(u(j, k));
      out(i, j) = s / tr;
    }
  return DensityMatrix{out.hermitized()};
}

}  // namespace qfilter
