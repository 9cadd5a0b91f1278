#pragma once

#include <complex>
#include <cstddef>

// Low-level dense complex kernels used by the filter inner loops.
// Scalar reference implementations live in kernels::scalar; an AVX2
// variant is selected at runtime when the CPU supports it.  Set
// QFILTER_SIMD=scalar to force the reference path.

namespace qfilter::kernels {

using cplx = std::complex<double>;

// y = A x with A row-major n x n.
void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y);

// y += alpha * x.
void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y);

// trace(A B) for row-major n x n matrices.
cplx ctrace_prod(std::size_t n, const cplx* a, const cplx* b);

// C = A B, row-major n x n.  Not dispatched; used for setup work only.
void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c);

// Name of the backend the dispatched kernels are bound to.
const char* active_backend();

namespace scalar {
void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y);
void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y);
cplx ctrace_prod(std::size_t n, const cplx* a, const cplx* b);
}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
bool supported();
void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y);
void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y);
cplx ctrace_prod(std::size_t n, const cplx* a, const cplx* b);
}  // namespace avx2
#endif

}  // namespace qfilter::kernels
