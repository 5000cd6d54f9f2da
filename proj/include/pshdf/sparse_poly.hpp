#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pshdf {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

// Graded order: lower total degree first, then lexicographically larger
// exponent vectors first (so z^2 precedes z zbar precedes zbar^2).
struct GradedOrder {
  bool operator()(const Exponents& a, const Exponents& b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return b < a;
  }
};

// Sparse multivariate polynomial over an exact coefficient ring. Zero
// coefficients are never stored.
template <class Coeff>
class SparsePoly {
 public:
  using Terms = std::map<Exponents, Coeff, GradedOrder>;

  explicit SparsePoly(std::size_t nvars = 0) : nvars_(nvars) {}

  static SparsePoly constant(std::size_t nvars, const Coeff& c) {
    SparsePoly p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
  }

  static SparsePoly variable(std::size_t nvars, std::size_t k) {
    Exponents e(nvars, 0);
    e.at(k) = 1;
    SparsePoly p(nvars);
    p.add_term(std::move(e), Coeff(1));
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Coeff coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  Coeff constant_term() const { return coeff(Exponents(nvars_, 0)); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  void add_term(Exponents e, const Coeff& c) {
    if (e.size() != nvars_) throw DimensionError("exponent vector has wrong length");
    if (c == Coeff(0)) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (it->second == Coeff(0)) terms_.erase(it);
    }
  }

  SparsePoly& operator+=(const SparsePoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  SparsePoly& operator-=(const SparsePoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  SparsePoly& operator*=(const SparsePoly& o) { return *this = *this * o; }

  friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
  friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }
  friend SparsePoly operator-(const SparsePoly& a) { return a.scaled(Coeff(-1)); }

  friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    a.check_same(b);
    SparsePoly out(a.nvars_);
    Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  friend bool operator==(const SparsePoly& a, const SparsePoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const SparsePoly& a, const SparsePoly& b) { return !(a == b); }

  SparsePoly scaled(const Coeff& s) const {
    SparsePoly out(nvars_);
    if (s == Coeff(0)) return out;
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * s);
    return out;
  }

  SparsePoly pow(unsigned k) const {
    SparsePoly result = constant(nvars_, Coeff(1));
    SparsePoly base = *this;
    while (k > 0) {
      if (k & 1u) result *= base;
      k >>= 1u;
      if (k > 0) base *= base;
    }
    return result;
  }

  // Formal partial derivative in variable k.
  SparsePoly derivative(std::size_t k) const {
    SparsePoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e.at(k) == 0) continue;
      Exponents d = e;
      --d[k];
      out.add_term(std::move(d), c * Coeff(e[k]));
    }
    return out;
  }

  // Term-by-term antiderivative in variable k, constant of integration 0.
  SparsePoly antiderivative(std::size_t k) const {
    SparsePoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      Exponents d = e;
      ++d.at(k);
      out.add_term(std::move(d), c / Coeff(d[k]));
    }
    return out;
  }

  SparsePoly truncated(int cap) const {
    SparsePoly out(nvars_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) <= cap) out.terms_.emplace(e, c);
    return out;
  }

  // Terms of exactly the given total degree.
  SparsePoly homogeneous_part(int deg) const {
    SparsePoly out(nvars_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) == deg) out.terms_.emplace(e, c);
    return out;
  }

  // Substitute each variable by a polynomial (all over the same target ring).
  template <class Target>
  Target substitute(const std::vector<Target>& images, const Target& one) const {
    if (images.size() != nvars_) throw DimensionError("substitution needs one image per variable");
    std::vector<std::vector<Target>> powers(nvars_);
    for (std::size_t k = 0; k < nvars_; ++k) powers[k].push_back(one);
    auto power_of = [&](std::size_t k, int p) -> const Target& {
      while (static_cast<int>(powers[k].size()) <= p) powers[k].push_back(powers[k].back() * images[k]);
      return powers[k][p];
    };
    Target out = one.scaled(0);
    for (const auto& [e, c] : terms_) {
      Target term = one.scaled(c);
      for (std::size_t k = 0; k < nvars_; ++k)
        if (e[k] > 0) term *= power_of(k, e[k]);
      out += term;
    }
    return out;
  }

  template <class F>
  SparsePoly map_terms(F&& f) const {
    SparsePoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      auto [e2, c2] = f(e, c);
      out.add_term(std::move(e2), c2);
    }
    return out;
  }

 private:
  void check_same(const SparsePoly& o) const {
    if (nvars_ != o.nvars_) throw DimensionError("polynomials over different variable counts");
  }

  std::size_t nvars_;
  Terms terms_;
};

}  // namespace pshdf
