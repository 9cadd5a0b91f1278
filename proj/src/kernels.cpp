#include "qfilter/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace qfilter::kernels {

namespace scalar {

void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc{0.0, 0.0};
    const cplx* row = a + i * n;
    for (std::size_t k = 0; k < n; ++k) acc += row[k] * x[k];
    y[i] = acc;
  }
}

void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

cplx ctrace_prod(std::size_t n, const cplx* a, const cplx* b) {
  // trace(AB) = sum_{i,k} A[i,k] B[k,i]
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) acc += a[i * n + k] * b[k * n + i];
  return acc;
}

}  // namespace scalar

void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] = cplx{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a[i * n + k];
      const cplx* brow = b + k * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

namespace {

using matvec_fn = void (*)(std::size_t, const cplx*, const cplx*, cplx*);
using axpy_fn = void (*)(std::size_t, cplx, const cplx*, cplx*);
using traceprod_fn = cplx (*)(std::size_t, const cplx*, const cplx*);

struct Dispatch {
  matvec_fn matvec = scalar::cmatvec;
  axpy_fn axpy = scalar::caxpy;
  traceprod_fn traceprod = scalar::ctrace_prod;
  const char* name = "scalar";

  Dispatch() {
    const char* force = std::getenv("QFILTER_SIMD");
    if (force != nullptr && std::strcmp(force, "scalar") == 0) return;
#if defined(__x86_64__)
    if (avx2::supported()) {
      matvec = avx2::cmatvec;
      axpy = avx2::caxpy;
      traceprod = avx2::ctrace_prod;
      name = "avx2";
    }
#endif
  }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace

void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y) {
  dispatch().matvec(n, a, x, y);
}

void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  dispatch().axpy(n, alpha, x, y);
}

cplx ctrace_prod(std::size_t n, const cplx* a, const cplx* b) {
  return dispatch().traceprod(n, a, b);
}

const char* active_backend() { return dispatch().name; }

}  // namespace qfilter::kernels
