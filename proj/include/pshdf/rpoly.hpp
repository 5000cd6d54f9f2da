#pragma once

#include <complex>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pshdf/gaussian_rational.hpp"
#include "pshdf/sparse_poly.hpp"

namespace pshdf {

// Real polynomial in x_1..x_{n-1}, y (y is the last variable).
using RPoly = SparsePoly<Rational>;

inline std::string rpoly_var_name(std::size_t nvars, std::size_t k) {
  if (k + 1 == nvars) return "y";
  return nvars == 2 ? std::string("x") : "x" + std::to_string(k + 1);
}

inline std::string to_string(const RPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    const bool negative = sgn(c) < 0;
    const Rational mag = negative ? Rational(-c) : c;
    os << (first ? (negative ? "-" : "") : (negative ? " - " : " + "));
    first = false;
    std::string ms;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (!ms.empty()) ms += '*';
      ms += rpoly_var_name(p.nvars(), k);
      if (e[k] > 1) ms += "^" + std::to_string(e[k]);
    }
    if (ms.empty())
      os << mag.get_str();
    else if (mag == 1)
      os << ms;
    else
      os << mag.get_str() << '*' << ms;
  }
  return os.str();
}

// Rounded-coefficient form for repeated evaluation at real points.
class CompiledRPoly {
 public:
  CompiledRPoly() = default;
  explicit CompiledRPoly(const RPoly& p) : nvars_(p.nvars()), max_exp_(p.nvars(), 0) {
    for (const auto& [e, c] : p.terms()) {
      exps_.push_back(e);
      coeffs_.push_back(c.get_d());
      for (std::size_t k = 0; k < e.size(); ++k) max_exp_[k] = std::max(max_exp_[k], e[k]);
    }
  }

  double operator()(std::span<const double> x) const {
    if (coeffs_.empty()) return 0.0;
    if (x.size() != nvars_) throw DimensionError("point has wrong dimension");
    std::vector<std::vector<double>> powers(nvars_);
    for (std::size_t k = 0; k < nvars_; ++k) {
      powers[k].resize(static_cast<std::size_t>(max_exp_[k]) + 1);
      powers[k][0] = 1.0;
      for (int p = 1; p <= max_exp_[k]; ++p) powers[k][p] = powers[k][p - 1] * x[k];
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      double term = coeffs_[t];
      for (std::size_t k = 0; k < nvars_; ++k)
        if (exps_[t][k] != 0) term *= powers[k][exps_[t][k]];
      sum += term;
    }
    return sum;
  }

 private:
  std::size_t nvars_ = 0;
  std::vector<Exponents> exps_;
  std::vector<double> coeffs_;
  std::vector<int> max_exp_;
};

}  // namespace pshdf
