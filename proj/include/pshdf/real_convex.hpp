#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pshdf/boundary.hpp"
#include "pshdf/cr_geometry.hpp"
#include "pshdf/linalg.hpp"
#include "pshdf/numeric_verify.hpp"
#include "pshdf/rpoly.hpp"

namespace pshdf {

// r = y + G(x_1, .., x_{n-1}, y) with every term of G of degree >= 2.
class RealDefiningFunction {
 public:
  explicit RealDefiningFunction(RPoly r) : r_(std::move(r)) {
    const std::size_t n = r_.nvars();
    if (n < 2) throw DimensionError("need at least one x variable and y");
    std::vector<std::string> v;
    if (sgn(r_.constant_term()) != 0) v.push_back("nonzero constant term");
    for (std::size_t k = 0; k < n; ++k) {
      Exponents e(n, 0);
      e[k] = 1;
      const Rational c = r_.coeff(e);
      if (k + 1 == n && c != 1) v.push_back("coefficient of y must be 1");
      if (k + 1 < n && sgn(c) != 0) v.push_back("linear term in " + rpoly_var_name(n, k));
    }
    if (!v.empty()) throw NormalFormError("not in normal form y + G", v);
  }

  const RPoly& r() const { return r_; }
  int dim() const { return static_cast<int>(r_.nvars()); }

 private:
  RPoly r_;
};

using RealPoint = std::vector<double>;

struct RealShell {
  double radius = 0.0;
  std::vector<RealPoint> points;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  int shrinks = 0;
};

// Halton in the x variables, y by Newton on r(x, y) = 0.
inline RealShell sample_real_boundary(const RealDefiningFunction& df, double radius, std::size_t count,
                                      std::uint64_t seed) {
  if (!(radius > 0.0)) throw ConfigError("shell radius must be positive");
  const std::size_t n = static_cast<std::size_t>(df.dim()), m = n - 1;
  const CompiledRPoly r(df.r()), ry(df.r().derivative(m));
  RealShell shell;
  shell.seed = seed;
  shell.count = count;
  for (;;) {
    ShiftedHalton seq(m, seed);
    shell.radius = radius;
    shell.points.clear();
    bool diverged = false;
    std::size_t attempts = 0;
    while (shell.points.size() < count && !diverged) {
      if (++attempts > 100 * count + 1000) throw ConfigError("could not place boundary samples");
      auto u = seq.next();
      RealPoint p(n, 0.0);
      double s = 0.0;
      for (std::size_t d = 0; d < m; ++d) {
        p[d] = radius * (2.0 * u[d] - 1.0);
        s += p[d] * p[d];
      }
      if (s > radius * radius) continue;
      bool ok = false;
      for (int it = 0; it < 50; ++it) {
        const double f = r(p), d = ry(p);
        if (!std::isfinite(f) || std::abs(d) < 1e-3) break;
        p[m] -= f / d;
        if (std::abs(r(p)) <= kBoundaryResidual) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        diverged = true;
        break;
      }
      if (std::sqrt(s + p[m] * p[m]) > radius) continue;
      shell.points.push_back(std::move(p));
    }
    if (!diverged) return shell;
    radius *= 0.5;
    if (++shell.shrinks > 20) throw ConfigError("Newton projection diverges at every radius tried");
  }
}

class RealHessianField {
 public:
  explicit RealHessianField(const RPoly& f) : n_(f.nvars()) {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) entries_.emplace_back(f.derivative(a).derivative(b));
  }
  std::vector<double> operator()(const RealPoint& p) const {
    std::vector<double> h(entries_.size());
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = entries_[k](p);
    return h;
  }
  std::size_t dim() const { return n_; }

 private:
  std::size_t n_;
  std::vector<CompiledRPoly> entries_;
};

namespace detail {

inline Point as_point(const RealPoint& p) { return Point(p.begin(), p.end()); }

inline std::vector<std::complex<double>> as_hermitian(const std::vector<double>& h) {
  return std::vector<std::complex<double>>(h.begin(), h.end());
}

}  // namespace detail

// Diagonal entries, (x_j, y) minors and least eigenvalue of the real Hessian.
inline PsdCheckResult real_hessian_check(const RPoly& f, const std::vector<RealPoint>& points,
                                         double tol = kDefaultTolerance) {
  const RealHessianField H(f);
  PsdCheckResult r;
  r.tolerance = tol;
  for (const auto& p : points)
    psd_accumulate(r, detail::as_point(p), detail::as_hermitian(H(p)), static_cast<int>(H.dim()));
  return r;
}

inline PsdCheckResult real_hessian_check(const RPoly& f, const RealShell& shell, double tol = kDefaultTolerance) {
  return real_hessian_check(f, shell.points, tol);
}

// Real analog of the Levi form: the Hessian of r on v_j = r_y e_j - r_{x_j} e_y.
inline RPoly tangential_form(const RealDefiningFunction& df, int j = 0) {
  const std::size_t m = static_cast<std::size_t>(df.dim() - 1);
  if (j < 0 || static_cast<std::size_t>(j) >= m) throw DimensionError("tangent index out of range");
  const RPoly& r = df.r();
  const auto x = static_cast<std::size_t>(j);
  const RPoly rx = r.derivative(x), ry = r.derivative(m);
  return r.derivative(x).derivative(x) * ry * ry - (r.derivative(x).derivative(m) * rx * ry).scaled(Rational(2)) +
         r.derivative(m).derivative(m) * rx * rx;
}

struct ConvexityScan {
  std::size_t samples = 0;
  std::size_t negatives = 0;
  double min_value = std::numeric_limits<double>::infinity();
  RealPoint min_point;
  std::optional<RealPoint> witness;
};

// Least eigenvalue of the Hessian restricted to span{v_j}.
inline ConvexityScan convexity_scan(const RealDefiningFunction& df, const std::vector<RealPoint>& points) {
  const std::size_t n = static_cast<std::size_t>(df.dim()), m = n - 1;
  const RealHessianField H(df.r());
  std::vector<CompiledRPoly> grad;
  for (std::size_t k = 0; k < n; ++k) grad.emplace_back(df.r().derivative(k));
  constexpr double noise = 64 * std::numeric_limits<double>::epsilon();
  ConvexityScan out;
  for (const auto& p : points) {
    const auto h = H(p);
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = grad[k](p);
    std::vector<double> L(m * m);
    double scale = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        // v_j has g_y at j and -g_j at y.
        const double a[2] = {g[m], -g[j]}, b[2] = {g[m], -g[k]};
        const std::size_t ia[2] = {j, m}, ib[2] = {k, m};
        double s = 0.0;
        for (int u = 0; u < 2; ++u)
          for (int v = 0; v < 2; ++v) {
            s += h[ia[u] * n + ib[v]] * a[u] * b[v];
            scale += std::abs(h[ia[u] * n + ib[v]] * a[u] * b[v]);
          }
        L[j * m + k] = s;
      }
    const double value = least_symmetric_eigenvalue(L, m);
    if (value < out.min_value) {
      out.min_value = value;
      out.min_point = p;
    }
    if (value < -noise * scale) {
      if (!out.witness) out.witness = p;
      ++out.negatives;
    }
    ++out.samples;
  }
  return out;
}

class NotConvexError : public std::runtime_error {
 public:
  NotConvexError(const std::string& what, RealPoint witness, double value)
      : std::runtime_error(what), witness_(std::move(witness)), value_(value) {}
  const RealPoint& witness() const { return witness_; }
  double value() const { return value_; }

 private:
  RealPoint witness_;
  double value_;
};

struct ConvexMultiplierConfig {
  double radius = 1e-2;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  int max_K_exp = 20;
  double tol = kDefaultTolerance;
};

struct ConvexMultiplierResult {
  bool found = false;
  int exponent = -1;
  Rational K{0};
  RPoly h;          // 1 + K r + r_y
  PsdCheckResult psd;
  ConvexityScan scan;
  double radius = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// h = 1 + K r + r_y with the smallest ladder K making r h PSD on the shell.
inline ConvexMultiplierResult convex_multiplier(const RealDefiningFunction& df, const ConvexMultiplierConfig& cfg = {}) {
  const std::size_t n = static_cast<std::size_t>(df.dim());
  const RPoly& r = df.r();
  const RealShell shell = sample_real_boundary(df, cfg.radius, cfg.samples, cfg.seed);
  ConvexMultiplierResult out;
  out.radius = shell.radius;
  out.samples = cfg.samples;
  out.seed = cfg.seed;
  out.scan = convexity_scan(df, shell.points);
  if (out.scan.witness)
    throw NotConvexError("not convex on the shell: tangential Hessian value " + detail::fmt(out.scan.min_value),
                         out.scan.min_point, out.scan.min_value);

  const RPoly base = (RPoly::constant(n, Rational(1)) + r.derivative(n - 1)) * r;
  const RealHessianField A(base), B(r * r);
  std::vector<std::vector<double>> a, b;
  for (const auto& p : shell.points) {
    a.push_back(A(p));
    b.push_back(B(p));
  }
  for (int e = 0; e <= cfg.max_K_exp; ++e) {
    const double K = std::ldexp(1.0, e);
    PsdCheckResult res;
    res.tolerance = cfg.tol;
    for (std::size_t i = 0; i < shell.points.size(); ++i) {
      std::vector<std::complex<double>> h(n * n);
      for (std::size_t k = 0; k < h.size(); ++k) h[k] = a[i][k] + K * b[i][k];
      psd_accumulate(res, detail::as_point(shell.points[i]), h, static_cast<int>(n));
    }
    out.psd = std::move(res);
    out.exponent = e;
    out.K = Rational(mpz_class(1) << e);
    if (out.psd.passed) {
      out.found = true;
      break;
    }
  }
  out.h = RPoly::constant(n, Rational(1)) + r.scaled(out.K) + r.derivative(n - 1);
  return out;
}

}  // namespace pshdf
