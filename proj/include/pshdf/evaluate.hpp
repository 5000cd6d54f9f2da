#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pshdf/wpoly.hpp"

namespace pshdf {

// A point of C^n as (z_1, ..., z_{n-1}, w); conjugates are taken numerically.
template <class Real = double>
using PointT = std::vector<std::complex<Real>>;
using Point = PointT<double>;

// WPoly with coefficients rounded once, for repeated floating evaluation.
template <class Real = double>
class CompiledPoly {
 public:
  using Complex = std::complex<Real>;

  CompiledPoly() = default;
  explicit CompiledPoly(const WPoly& p) : n_(p.dim()), max_exp_(WPoly::nslots(p.dim()), 0) {
    for (const auto& [e, c] : p.terms()) {
      exps_.push_back(e);
      coeffs_.push_back(c.template to_complex<Real>());
      for (std::size_t k = 0; k < e.size(); ++k) max_exp_[k] = std::max(max_exp_[k], e[k]);
    }
  }

  int dim() const { return n_; }
  bool is_zero() const { return coeffs_.empty(); }

  Complex operator()(std::span<const Complex> point) const { return evaluate(point, nullptr); }

  // Also reports sum |term|, which bounds the floating round-off up to a
  // small multiple of machine epsilon.
  Complex operator()(std::span<const Complex> point, Real& magnitude) const { return evaluate(point, &magnitude); }

 private:
  Complex evaluate(std::span<const Complex> point, Real* magnitude) const {
    if (magnitude) *magnitude = Real(0);
    if (coeffs_.empty()) return Complex(0);
    if (static_cast<int>(point.size()) != n_) throw DimensionError("point has wrong dimension");
    const int m = n_ - 1;
    const std::size_t ns = max_exp_.size();
    std::vector<std::vector<Complex>> powers(ns);
    for (std::size_t k = 0; k < ns; ++k) {
      const int ik = static_cast<int>(k);
      Complex base;
      if (ik < m)
        base = point[k];
      else if (ik < 2 * m)
        base = std::conj(point[k - m]);
      else
        base = ik == 2 * m ? point[m] : std::conj(point[m]);
      auto& pw = powers[k];
      pw.resize(static_cast<std::size_t>(max_exp_[k]) + 1);
      pw[0] = Complex(1);
      for (int p = 1; p <= max_exp_[k]; ++p) pw[p] = pw[p - 1] * base;
    }
    Complex sum(0);
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      Complex term = coeffs_[t];
      const auto& e = exps_[t];
      for (std::size_t k = 0; k < ns; ++k)
        if (e[k] != 0) term *= powers[k][e[k]];
      sum += term;
      if (magnitude) *magnitude += std::abs(term);
    }
    return sum;
  }

  int n_ = 2;
  std::vector<Exponents> exps_;
  std::vector<Complex> coeffs_;
  std::vector<int> max_exp_;
};

template <class Real = double>
std::complex<Real> eval(const WPoly& p, std::span<const std::complex<Real>> point) {
  return CompiledPoly<Real>(p)(point);
}

inline std::complex<double> eval(const WPoly& p, const Point& point) {
  return CompiledPoly<double>(p)(std::span<const std::complex<double>>(point));
}

}  // namespace pshdf
