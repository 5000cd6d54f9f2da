#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pshdf/cr_geometry.hpp"
#include "pshdf/evaluate.hpp"

namespace pshdf {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kBoundaryResidual = 1e-12;

inline double norm(const Point& p) {
  double s = 0.0;
  for (const auto& c : p) s += std::norm(c);
  return std::sqrt(s);
}

// Solves r(z, u + i v) = level for v by 1-D Newton. The normal form gives
// dr/dv = 1 at the origin, so Newton from v = 0 converges near 0.
class BoundaryProjector {
 public:
  explicit BoundaryProjector(const DefiningFunction& df, double level = 0.0)
      : n_(df.dim()), level_(level), r_(df.r()) {
    const WPoly& r = df.r();
    rv_ = CompiledPoly<>((r.deriv(Var::w()) - r.deriv(Var::wbar())).scaled(GaussianRational::imag_unit()));
  }

  int dim() const { return n_; }
  double level() const { return level_; }

  // z holds n-1 values; returns the projected point or nullopt on divergence.
  std::optional<Point> project(std::span<const std::complex<double>> z, double re_w, double* residual = nullptr) const {
    Point p(z.begin(), z.end());
    p.emplace_back(re_w, 0.0);
    double v = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 80; ++it) {
      p.back() = {re_w, v};
      const double f = r_(p).real() - level_;
      const double af = std::abs(f);
      if (af < best) best = af;
      if (af == 0.0) break;
      const double df = rv_(p).real();
      if (!std::isfinite(df) || std::abs(df) < 1e-14) return std::nullopt;
      const double step = f / df;
      v -= step;
      if (!std::isfinite(v) || std::abs(v) > 1e3) return std::nullopt;
      if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(v))) {
        p.back() = {re_w, v};
        best = std::min(best, std::abs(r_(p).real() - level_));
        break;
      }
    }
    p.back() = {re_w, v};
    const double res = std::abs(r_(p).real() - level_);
    if (residual) *residual = res;
    if (!(res <= kBoundaryResidual)) return std::nullopt;
    return p;
  }

  // Real coordinates (x_1, y_1, .., x_{n-1}, y_{n-1}, u) of the tangential part.
  std::optional<Point> project_real(std::span<const double> coords, double* residual = nullptr) const {
    const int m = n_ - 1;
    std::vector<std::complex<double>> z(m);
    for (int j = 0; j < m; ++j) z[j] = {coords[2 * j], coords[2 * j + 1]};
    return project(z, coords[2 * m], residual);
  }

 private:
  int n_;
  double level_;
  CompiledPoly<> r_;
  CompiledPoly<> rv_;
};

// Low-discrepancy Halton sequence with a seeded Cranley-Patterson shift.
class ShiftedHalton {
 public:
  ShiftedHalton(std::size_t dims, std::uint64_t seed) : dims_(dims), shift_(dims) {
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dims > std::size(primes)) throw ConfigError("too many sampling dimensions");
    bases_.assign(primes, primes + dims);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& s : shift_) s = u(rng);
  }

  std::vector<double> next() {
    ++index_;
    std::vector<double> out(dims_);
    for (std::size_t d = 0; d < dims_; ++d) {
      double f = 1.0, x = 0.0;
      for (std::uint64_t i = index_; i > 0; i /= bases_[d]) {
        f /= bases_[d];
        x += f * static_cast<double>(i % bases_[d]);
      }
      x += shift_[d];
      out[d] = x - std::floor(x);
    }
    return out;
  }

 private:
  std::size_t dims_;
  std::vector<std::uint64_t> bases_;
  std::vector<double> shift_;
  std::uint64_t index_ = 0;
};

struct BoundaryShell {
  double radius = 0.0;
  double requested_radius = 0.0;
  int shrinks = 0;  // times the radius was halved after Newton divergence
  std::uint64_t seed = 0;
  std::size_t count = 0;
  double level = 0.0;
  std::vector<Point> points;
  double max_residual = 0.0;
};

// `count` boundary points with |point| <= radius, low-discrepancy in the
// tangential coordinates (Re z, Im z, Re w) and Im w solved by Newton.
inline BoundaryShell sample_boundary(const DefiningFunction& df, double radius, std::size_t count, std::uint64_t seed,
                                     double level = 0.0) {
  if (!(radius > 0.0)) throw ConfigError("shell radius must be positive");
  const BoundaryProjector proj(df, level);
  const int m = df.dim() - 1;
  const std::size_t dims = static_cast<std::size_t>(2 * m + 1);
  BoundaryShell shell;
  shell.requested_radius = radius;
  shell.seed = seed;
  shell.count = count;
  shell.level = level;
  for (;;) {
    ShiftedHalton seq(dims, seed);
    shell.radius = radius;
    shell.points.clear();
    shell.max_residual = 0.0;
    bool diverged = false;
    std::size_t attempts = 0;
    while (shell.points.size() < count) {
      if (++attempts > 100 * count + 1000) throw ConfigError("could not place boundary samples");
      auto u = seq.next();
      std::vector<double> c(dims);
      double s = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        c[d] = radius * (2.0 * u[d] - 1.0);
        s += c[d] * c[d];
      }
      if (s > radius * radius) continue;
      double res = 0.0;
      auto p = proj.project_real(c, &res);
      if (!p) {
        diverged = true;
        break;
      }
      if (norm(*p) > radius) continue;
      shell.max_residual = std::max(shell.max_residual, res);
      shell.points.push_back(std::move(*p));
    }
    if (!diverged) return shell;
    radius *= 0.5;
    ++shell.shrinks;
    if (shell.shrinks > 20) throw ConfigError("Newton projection diverges at every radius tried");
  }
}

}  // namespace pshdf
