#pragma once

#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "pshdf/gaussian_rational.hpp"
#include "pshdf/sparse_poly.hpp"

namespace pshdf {

enum class VarKind { Z, ZBar, W, WBar };

// One of the conjugate-pair variables z_j, zbar_j, w, wbar (j is 0-based).
struct Var {
  VarKind kind = VarKind::Z;
  int index = 0;

  static Var z(int j = 0) { return {VarKind::Z, j}; }
  static Var zbar(int j = 0) { return {VarKind::ZBar, j}; }
  static Var w() { return {VarKind::W, 0}; }
  static Var wbar() { return {VarKind::WBar, 0}; }

  // Holomorphic coordinate k of C^n: z_k for k < n-1, w for k == n-1.
  static Var holo(int k, int n) { return k < n - 1 ? z(k) : w(); }
  static Var antiholo(int k, int n) { return k < n - 1 ? zbar(k) : wbar(); }
};

// Polynomial in z_1..z_{n-1}, zbar_1..zbar_{n-1}, w, wbar with exact Gaussian
// rational coefficients. Slot layout of an exponent vector:
// [a_1..a_{n-1}, b_1..b_{n-1}, c, d].
class WPoly {
 public:
  using Poly = SparsePoly<GaussianRational>;

  explicit WPoly(int n = 2) : n_(check_dim(n)), poly_(nslots(n)) {}
  WPoly(int n, Poly p) : n_(check_dim(n)), poly_(std::move(p)) {
    if (poly_.nvars() != nslots(n)) throw DimensionError("polynomial slot count does not match dimension");
  }

  static WPoly constant(int n, const GaussianRational& c) { return {n, Poly::constant(nslots(n), c)}; }
  static WPoly var(int n, Var v) { return {n, Poly::variable(nslots(n), slot(n, v))}; }
  static WPoly z(int n, int j = 0) { return var(n, Var::z(j)); }
  static WPoly zbar(int n, int j = 0) { return var(n, Var::zbar(j)); }
  static WPoly w(int n) { return var(n, Var::w()); }
  static WPoly wbar(int n) { return var(n, Var::wbar()); }
  static WPoly re_z(int n, int j = 0) { return (z(n, j) + zbar(n, j)).scaled(make_rational(1, 2)); }
  static WPoly im_z(int n, int j = 0) { return (z(n, j) - zbar(n, j)).scaled(GaussianRational(0, make_rational(-1, 2))); }
  static WPoly re_w(int n) { return (w(n) + wbar(n)).scaled(make_rational(1, 2)); }
  static WPoly im_w(int n) { return (w(n) - wbar(n)).scaled(GaussianRational(0, make_rational(-1, 2))); }
  static WPoly abs2_z(int n, int j = 0) { return z(n, j) * zbar(n, j); }

  static std::size_t nslots(int n) { return static_cast<std::size_t>(2 * (n - 1) + 2); }
  static std::size_t slot(int n, Var v) {
    const int m = n - 1;
    if (v.kind == VarKind::Z || v.kind == VarKind::ZBar) {
      if (v.index < 0 || v.index >= m) throw DimensionError("z index out of range");
      return static_cast<std::size_t>(v.kind == VarKind::Z ? v.index : m + v.index);
    }
    return static_cast<std::size_t>(v.kind == VarKind::W ? 2 * m : 2 * m + 1);
  }

  int dim() const { return n_; }
  int nz() const { return n_ - 1; }
  const Poly& poly() const { return poly_; }
  const Poly::Terms& terms() const { return poly_.terms(); }
  bool is_zero() const { return poly_.is_zero(); }
  int degree() const { return poly_.degree(); }
  std::size_t size() const { return poly_.size(); }
  GaussianRational coeff(const Exponents& e) const { return poly_.coeff(e); }
  GaussianRational constant_term() const { return poly_.constant_term(); }

  WPoly& operator+=(const WPoly& o) {
    check_same(o);
    poly_ += o.poly_;
    return *this;
  }
  WPoly& operator-=(const WPoly& o) {
    check_same(o);
    poly_ -= o.poly_;
    return *this;
  }
  WPoly& operator*=(const WPoly& o) {
    check_same(o);
    poly_ *= o.poly_;
    return *this;
  }
  friend WPoly operator+(WPoly a, const WPoly& b) { return a += b; }
  friend WPoly operator-(WPoly a, const WPoly& b) { return a -= b; }
  friend WPoly operator*(WPoly a, const WPoly& b) { return a *= b; }
  friend WPoly operator-(const WPoly& a) { return a.scaled(GaussianRational(-1)); }
  friend WPoly operator+(WPoly a, const GaussianRational& c) { return a += constant(a.dim(), c); }
  friend WPoly operator+(const GaussianRational& c, WPoly a) { return a += constant(a.dim(), c); }
  friend WPoly operator*(const GaussianRational& c, const WPoly& a) { return a.scaled(c); }
  friend bool operator==(const WPoly& a, const WPoly& b) { return a.n_ == b.n_ && a.poly_ == b.poly_; }
  friend bool operator!=(const WPoly& a, const WPoly& b) { return !(a == b); }

  WPoly scaled(const GaussianRational& s) const { return {n_, poly_.scaled(s)}; }
  WPoly pow(unsigned k) const { return {n_, poly_.pow(k)}; }

  static Exponents conjugate_exponents(const Exponents& e) {
    const std::size_t m = (e.size() - 2) / 2;
    Exponents c(e.size());
    for (std::size_t j = 0; j < m; ++j) {
      c[j] = e[m + j];
      c[m + j] = e[j];
    }
    c[2 * m] = e[2 * m + 1];
    c[2 * m + 1] = e[2 * m];
    return c;
  }

  WPoly conjugate() const {
    return {n_, poly_.map_terms([](const Exponents& e, const GaussianRational& c) {
              return std::pair{conjugate_exponents(e), c.conj()};
            })};
  }

  bool is_real() const {
    for (const auto& [e, c] : poly_.terms())
      if (poly_.coeff(conjugate_exponents(e)) != c.conj()) return false;
    return true;
  }

  WPoly deriv(Var v) const { return {n_, poly_.derivative(slot(n_, v))}; }
  WPoly deriv(Var a, Var b) const { return deriv(a).deriv(b); }

  // Q with dQ/dz_j = *this and zero constant of integration.
  WPoly antiderivative_z(int j = 0) const { return {n_, poly_.antiderivative(slot(n_, Var::z(j)))}; }

  // q + conj(q); always real.
  WPoly realify() const { return *this + conjugate(); }

  // (p + conj p)/2 and (p - conj p)/(2i).
  WPoly real_part() const { return (*this + conjugate()).scaled(make_rational(1, 2)); }
  WPoly imag_part() const { return (*this - conjugate()).scaled(GaussianRational(0, make_rational(-1, 2))); }

  WPoly truncated(int cap) const {
    if (cap < 0) throw std::invalid_argument("degree cap must be non-negative");
    return {n_, poly_.truncated(cap)};
  }

  // Exact value at a Gaussian-rational point (z_1..z_{n-1}, w).
  GaussianRational evaluate_exact(const std::vector<GaussianRational>& point) const {
    if (static_cast<int>(point.size()) != n_) throw DimensionError("point has wrong dimension");
    std::vector<GaussianRational> vals(nslots(n_));
    const int m = n_ - 1;
    for (int j = 0; j < m; ++j) {
      vals[j] = point[j];
      vals[m + j] = point[j].conj();
    }
    vals[2 * m] = point[m];
    vals[2 * m + 1] = point[m].conj();
    GaussianRational sum(0);
    for (const auto& [e, c] : poly_.terms()) {
      GaussianRational t = c;
      for (std::size_t k = 0; k < e.size(); ++k)
        for (int p = 0; p < e[k]; ++p) t *= vals[k];
      sum += t;
    }
    return sum;
  }

  std::string slot_name(std::size_t k) const {
    const int m = n_ - 1;
    const int ik = static_cast<int>(k);
    auto zname = [&](int j) { return m == 1 ? std::string("z") : "z" + std::to_string(j + 1); };
    if (ik < m) return zname(ik);
    if (ik < 2 * m) return zname(ik - m) + "bar";
    return ik == 2 * m ? "w" : "wbar";
  }

  std::string monomial_string(const Exponents& e) const {
    std::string out;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (!out.empty()) out += ' ';
      out += slot_name(k);
      if (e[k] > 1) out += "^" + std::to_string(e[k]);
    }
    return out;
  }

  // Canonical sorted-monomial form, e.g. "z^2 - (1/2)i * w + 2 * z zbar".
  std::string to_string() const {
    if (poly_.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : poly_.terms()) {
      const bool negative = (c.is_real() && sgn(c.re()) < 0) || (c.is_imag() && sgn(c.im()) < 0);
      const GaussianRational mag = negative ? -c : c;
      std::string cs = mag.to_string();
      if (!mag.is_real() && !mag.is_imag()) cs = "(" + cs + ")";
      if (first)
        os << (negative ? "-" : "");
      else
        os << (negative ? " - " : " + ");
      first = false;
      const std::string ms = monomial_string(e);
      if (ms.empty())
        os << cs;
      else if (mag == GaussianRational(1))
        os << ms;
      else
        os << cs << " * " << ms;
    }
    return os.str();
  }

  // Expansion in real coordinates (x_1, y_1, ..., x_{n-1}, y_{n-1}, u, v)
  // where z_j = x_j + i y_j and w = u + i v.
  SparsePoly<GaussianRational> real_coordinates() const {
    const int m = n_ - 1;
    const std::size_t nr = static_cast<std::size_t>(2 * m + 2);
    using RP = SparsePoly<GaussianRational>;
    const GaussianRational i = GaussianRational::imag_unit();
    std::vector<RP> images(nslots(n_), RP(nr));
    for (int j = 0; j < m; ++j) {
      RP x = RP::variable(nr, 2 * j), y = RP::variable(nr, 2 * j + 1);
      images[j] = x + y.scaled(i);
      images[m + j] = x - y.scaled(i);
    }
    RP u = RP::variable(nr, 2 * m), v = RP::variable(nr, 2 * m + 1);
    images[2 * m] = u + v.scaled(i);
    images[2 * m + 1] = u - v.scaled(i);
    return poly_.substitute(images, RP::constant(nr, GaussianRational(1)));
  }

  std::string real_slot_name(std::size_t k) const {
    const int m = n_ - 1;
    const int ik = static_cast<int>(k);
    if (ik < 2 * m) {
      std::string zn = m == 1 ? "z" : "z" + std::to_string(ik / 2 + 1);
      return (ik % 2 == 0 ? "Re(" : "Im(") + zn + ")";
    }
    return ik == 2 * m ? "Re(w)" : "Im(w)";
  }

  // Human form in Re/Im coordinates, e.g. "8*Im(z)^2 - 8*Re(z)^2".
  std::string to_real_string() const {
    const auto rp = real_coordinates();
    if (rp.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : rp.terms()) {
      const bool negative = c.is_real() && sgn(c.re()) < 0;
      const GaussianRational mag = negative ? -c : c;
      std::string cs = mag.to_string();
      if (!mag.is_real()) cs = "(" + cs + ")";
      os << (first ? (negative ? "-" : "") : (negative ? " - " : " + "));
      first = false;
      std::string ms;
      for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] == 0) continue;
        if (!ms.empty()) ms += '*';
        ms += real_slot_name(k);
        if (e[k] > 1) ms += "^" + std::to_string(e[k]);
      }
      if (ms.empty())
        os << cs;
      else if (mag == GaussianRational(1))
        os << ms;
      else
        os << cs << '*' << ms;
    }
    return os.str();
  }

 private:
  static int check_dim(int n) {
    if (n < 2) throw DimensionError("dimension must be at least 2");
    return n;
  }
  void check_same(const WPoly& o) const {
    if (n_ != o.n_) throw DimensionError("polynomials over different dimensions");
  }

  int n_;
  Poly poly_;
};

inline std::ostream& operator<<(std::ostream& os, const WPoly& p) { return os << p.to_string(); }

}  // namespace pshdf
