#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "pshdf/sparse_poly.hpp"

namespace pshdf {

// Eigenvalues of a real symmetric matrix (row-major) by cyclic Jacobi.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw DimensionError("matrix has wrong size");
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += at(i, i) * at(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    }
    if (off <= 1e-30 * (diag + 1e-300)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  return ev;
}

inline double least_symmetric_eigenvalue(const std::vector<double>& a, std::size_t n) {
  if (n == 1) return a[0];
  if (n == 2) {
    const double m = 0.5 * (a[0] + a[3]), d = 0.5 * (a[0] - a[3]);
    return m - std::hypot(d, a[1]);
  }
  auto ev = symmetric_eigenvalues(a, n);
  double lo = ev[0];
  for (double e : ev) lo = std::min(lo, e);
  return lo;
}

// Least eigenvalue of a Hermitian matrix (row-major). n = 2 uses the closed
// form; larger n goes through the real 2n x 2n embedding [[A, -B], [B, A]].
inline double least_hermitian_eigenvalue(std::span<const std::complex<double>> h, std::size_t n) {
  if (h.size() != n * n) throw DimensionError("matrix has wrong size");
  if (n == 1) return h[0].real();
  if (n == 2) {
    const double m = 0.5 * (h[0].real() + h[3].real()), d = 0.5 * (h[0].real() - h[3].real());
    return m - std::hypot(d, std::abs(h[1]));
  }
  const std::size_t N = 2 * n;
  std::vector<double> a(N * N);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // symmetrize against round-off
      const std::complex<double> v = 0.5 * (h[i * n + j] + std::conj(h[j * n + i]));
      a[i * N + j] = v.real();
      a[(i + n) * N + (j + n)] = v.real();
      a[i * N + (j + n)] = -v.imag();
      a[(i + n) * N + j] = v.imag();
    }
  }
  return least_symmetric_eigenvalue(a, N);
}

}  // namespace pshdf
