#pragma once

#include <complex>
#include <initializer_list>
#include <utility>
#include <stdexcept>
#include <vector>

#include "qfilter/kernels.hpp"

namespace qfilter {

using cplx = std::complex<double>;

// Small dense complex matrix, row-major.  All operators in this project
// have dim <= 4 (superoperators dim <= 16), so everything is dense and
// by value.
class CMat {
 public:
  CMat() = default;
  explicit CMat(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {
    if (dim <= 0) throw std::invalid_argument("CMat: dim must be positive");
  }
  CMat(int dim, std::initializer_list<cplx> entries) : CMat(dim) {
    if (entries.size() != a_.size())
      throw std::invalid_argument("CMat: wrong number of entries");
    std::copy(entries.begin(), entries.end(), a_.begin());
  }

  static CMat identity(int dim) {
    CMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static CMat zero(int dim) { return CMat(dim); }

  int dim() const { return dim_; }
  cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  const cplx& operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * dim_ + j];
  }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }
  std::size_t size() const { return a_.size(); }

  CMat adjoint() const {
    CMat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
  }

  cplx trace() const {
    cplx t{0.0, 0.0};
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  CMat& operator+=(const CMat& o) {
    check_dim(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  CMat& operator-=(const CMat& o) {
    check_dim(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  CMat& operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
  }

  friend CMat operator+(CMat a, const CMat& b) { return a += b; }
  friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
  friend CMat operator*(cplx s, CMat a) { return a *= s; }
  friend CMat operator*(CMat a, cplx s) { return a *= s; }

  friend CMat operator*(const CMat& a, const CMat& b) {
    a.check_dim(b);
    CMat c(a.dim_);
    kernels::cmatmul(static_cast<std::size_t>(a.dim_), a.data(), b.data(), c.data());
    return c;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_hermitian(double tol) const {
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j)
        if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
  }

  // (M + M†)/2; repairs Hermiticity drift without changing the trace.
  CMat hermitized() const {
    CMat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        r(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return r;
  }

 private:
  void check_dim(const CMat& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("CMat: dimension mismatch");
  }

  int dim_ = 0;
  std::vector<cplx> a_;
};

inline double max_abs_diff(const CMat& a, const CMat& b) {
  return (a - b).max_abs();
}

// Kronecker product, used to assemble atom (x) configuration operators.
inline CMat kron(const CMat& a, const CMat& b) {
  const int da = a.dim(), db = b.dim();
  CMat r(da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) r(i * db + k, j * db + l) = a(i, j) * b(k, l);
  return r;
}

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps:
// returns (eigenvalues, unitary with matching eigenvector columns), in
// no particular order.  Small matrices only.
std::pair<std::vector<double>, CMat> hermitian_eigensystem(const CMat& m);

// Sorted eigenvalues only.
std::vector<double> hermitian_eigenvalues(const CMat& m);

}  // namespace qfilter
