#include "qfilter/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace qfilter {

std::pair<std::vector<double>, CMat> hermitian_eigensystem(const CMat& m) {
  const int n = m.dim();
  CMat a = m.hermitized();
  CMat v = CMat::identity(n);
  const double scale = std::max(a.max_abs(), 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= 1e-15 * scale) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * scale) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double phase = std::arg(apq);
        const double theta = 0.5 * std::atan2(-2.0 * std::abs(apq), app - aqq);
        const double c = std::cos(theta);
        const cplx s = std::sin(theta) * std::exp(cplx{0.0, phase});

        CMat j = CMat::identity(n);
        j(p, p) = c;
        j(p, q) = s;
        j(q, p) = -std::conj(s);
        j(q, q) = c;
        a = j.adjoint() * a * j;
        v = v * j;
      }
    }
  }

  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i).real();
  return {std::move(ev), std::move(v)};
}

std::vector<double> hermitian_eigenvalues(const CMat& m) {
  auto ev = hermitian_eigensystem(m).first;
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace qfilter
