#pragma once

#include <array>
#include <utility>
#include <vector>

#include "qfilter/matrix.hpp"

namespace qfilter {

// Validation tolerances for conditioned states.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kEigenTol = 1e-9;

// Hermitian, unit-trace, positive-semidefinite state rho_t.
struct DensityMatrix {
  CMat mat;

  int dim() const { return mat.dim(); }

  // Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

// Conditioned state without normalization; trace(mat) carries the
// running likelihood.
struct UnnormalizedState {
  CMat mat;
};

// Hamiltonian, monitored collapse operator and unmonitored Lindblad
// operators, all sharing one Hilbert-space dimension.
struct OperatorSet {
  int dim = 0;
  CMat H;
  CMat c;
  std::vector<CMat> hidden;

  void validate() const;
};

CMat commutator(const CMat& a, const CMat& b);
CMat anticommutator(const CMat& a, const CMat& b);

// D[J](rho) = J rho J† - {J†J, rho}/2.
CMat lindblad_dissipator(const CMat& j, const CMat& rho);

// (tr(rho sigma_x), tr(rho sigma_y), tr(rho sigma_z)); dim 2 only.
std::array<double, 3> bloch_vector(const DensityMatrix& rho);

// Hermitizes, rescales to unit trace and returns log of the trace.
// Throws std::domain_error on non-positive trace (zero-probability
// click or likelihood underflow).
std::pair<DensityMatrix, double> renormalize(const UnnormalizedState& state);

// Pauli matrices in the basis (|e>, |g>) with sigma_z|e> = +|e>.
const CMat& sigma_x();
const CMat& sigma_y();
const CMat& sigma_z();
const CMat& sigma_minus();  // |g><e|

DensityMatrix ground_state();
DensityMatrix excited_state();

// Clamps negative eigenvalues to zero and rescales to unit trace.
// First-order filter steps can leave the positive cone by O(dt) between
// renormalizations; snapshots are projected back before they are
// emitted as DensityMatrix values.  Throws std::domain_error if the
// clamped trace vanishes.
DensityMatrix project_psd(const CMat& m);

}  // namespace qfilter
