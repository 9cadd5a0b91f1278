// AVX2 variants of the complex kernels.  Compiled with -mavx2 -mfma and
// bound at runtime only when cpuid reports support.

#include "qfilter/kernels.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

namespace qfilter::kernels::avx2 {

bool supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

// Packed product of two complex pairs: [a0*b0, a1*b1] on interleaved
// re/im lanes.
inline __m256d cmul2(__m256d a, __m256d b) {
  __m256d br = _mm256_movedup_pd(b);
  __m256d bi = _mm256_permute_pd(b, 0xF);
  __m256d aswap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(aswap, bi));
}

inline cplx hsum2(__m256d acc) {
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d s = _mm_add_pd(lo, hi);
  alignas(16) double out[2];
  _mm_store_pd(out, s);
  return {out[0], out[1]};
}

}  // namespace

void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  const std::size_t n2 = n & ~std::size_t{1};
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = reinterpret_cast<const double*>(a + i * n);
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k < n2; k += 2) {
      __m256d va = _mm256_loadu_pd(row + 2 * k);
      __m256d vx = _mm256_loadu_pd(xd + 2 * k);
      acc = _mm256_add_pd(acc, cmul2(va, vx));
    }
    cplx sum = hsum2(acc);
    if (k < n) sum += a[i * n + k] * x[k];
    y[i] = sum;
  }
}

void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  __m256d ar = _mm256_set1_pd(alpha.real());
  __m256d ai = _mm256_set1_pd(alpha.imag());
  const std::size_t n2 = n & ~std::size_t{1};
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    __m256d xswap = _mm256_permute_pd(vx, 0x5);
    __m256d p = _mm256_fmaddsub_pd(vx, ar, _mm256_mul_pd(xswap, ai));
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(vy, p));
  }
  if (i < n) y[i] += alpha * x[i];
}

cplx ctrace_prod(std::size_t n, const cplx* a, const cplx* b) {
  // Column accesses of B are strided; assemble pairs explicitly.  The
  // matrices here are small (dim <= 16), so this stays cheap.
  __m256d acc = _mm256_setzero_pd();
  cplx tail{0.0, 0.0};
  const std::size_t n2 = n & ~std::size_t{1};
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = reinterpret_cast<const double*>(a + i * n);
    std::size_t k = 0;
    for (; k < n2; k += 2) {
      __m256d va = _mm256_loadu_pd(row + 2 * k);
      const cplx b0 = b[k * n + i];
      const cplx b1 = b[(k + 1) * n + i];
      __m256d vb = _mm256_set_pd(b1.imag(), b1.real(), b0.imag(), b0.real());
      acc = _mm256_add_pd(acc, cmul2(va, vb));
    }
    if (k < n) tail += a[i * n + k] * b[k * n + i];
  }
  return hsum2(acc) + tail;
}

}  // namespace qfilter::kernels::avx2

#endif  // __x86_64__
