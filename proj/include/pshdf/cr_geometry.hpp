#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pshdf/evaluate.hpp"
#include "pshdf/wpoly.hpp"

namespace pshdf {

class NormalFormError : public std::invalid_argument {
 public:
  NormalFormError(const std::string& what, std::vector<std::string> violations)
      : std::invalid_argument(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct NormalFormCheck;
NormalFormCheck validate_normal_form(const WPoly& r);

// r = Im w + F with F real and of order at least 2 at the origin.
class DefiningFunction {
 public:
  const WPoly& r() const { return r_; }
  int dim() const { return r_.dim(); }
  int nz() const { return r_.nz(); }
  bool normal_form_checked() const { return true; }

  // F = r - Im w.
  WPoly higher_order_part() const { return r_ - WPoly::im_w(r_.dim()); }

 private:
  explicit DefiningFunction(WPoly r) : r_(std::move(r)) {}
  friend NormalFormCheck validate_normal_form(const WPoly& r);

  WPoly r_;
};

struct NormalFormCheck {
  std::vector<std::string> violations;
  std::optional<DefiningFunction> value;

  bool valid() const { return value.has_value(); }
};

inline NormalFormCheck validate_normal_form(const WPoly& r) {
  NormalFormCheck out;
  const int n = r.dim();
  if (!r.is_real()) out.violations.push_back("not real: coefficients are not conjugate-symmetric");
  if (!r.constant_term().is_zero())
    out.violations.push_back("nonzero constant term " + r.constant_term().to_string());

  const GaussianRational half_i(0, make_rational(1, 2));
  Exponents ew(WPoly::nslots(n), 0), ewb(WPoly::nslots(n), 0);
  ew[WPoly::slot(n, Var::w())] = 1;
  ewb[WPoly::slot(n, Var::wbar())] = 1;
  if (r.coeff(ew) != -half_i || r.coeff(ewb) != half_i)
    out.violations.push_back("wrong linear part: expected exactly Im w = -(1/2)i * w + (1/2)i * wbar, found " +
                             r.coeff(ew).to_string() + " on w and " + r.coeff(ewb).to_string() + " on wbar");

  for (const auto& [e, c] : r.terms()) {
    if (total_degree(e) != 1 || e == ew || e == ewb) continue;
    out.violations.push_back("degree-1 term in F: " + c.to_string() + " * " + r.monomial_string(e));
  }
  if (out.violations.empty()) out.value = DefiningFunction(r);
  return out;
}

inline DefiningFunction make_defining_function(const WPoly& r) {
  auto check = validate_normal_form(r);
  if (!check.valid()) {
    std::string msg = "not in normal form Im w + F:";
    for (const auto& v : check.violations) msg += "\n  " + v;
    throw NormalFormError(msg, check.violations);
  }
  return *check.value;
}

// f_{a bbar} where a, b index the holomorphic coordinates (z_1..z_{n-1}, w).
inline WPoly hessian_entry(const WPoly& f, int a, int b) {
  const int n = f.dim();
  if (a < 0 || a >= n || b < 0 || b >= n) throw DimensionError("Hessian index out of range");
  return f.deriv(Var::holo(a, n)).deriv(Var::antiholo(b, n));
}

// Determinant of the (z_j, w) principal 2x2 minor of the complex Hessian.
inline WPoly hessian_minor_det(const WPoly& f, int j = 0) {
  const int n = f.dim();
  if (j < 0 || j >= n - 1) throw DimensionError("minor index out of range");
  const int wi = n - 1;
  return hessian_entry(f, j, j) * hessian_entry(f, wi, wi) - hessian_entry(f, j, wi) * hessian_entry(f, wi, j);
}

// v_j = <0, .., r_w (slot j), .., 0, -r_{z_j}>.
inline std::vector<WPoly> tangent_vector(const DefiningFunction& df, int j = 0) {
  const int n = df.dim();
  if (j < 0 || j >= n - 1) throw DimensionError("tangent index out of range");
  std::vector<WPoly> v(n, WPoly(n));
  v[j] = df.r().deriv(Var::w());
  v[n - 1] = -df.r().deriv(Var::z(j));
  return v;
}

// sum_{a,b} f_{a bbar} xi_a conj(xi_b), symbolically.
inline WPoly hessian_apply(const WPoly& f, const std::vector<WPoly>& xi) {
  const int n = f.dim();
  if (static_cast<int>(xi.size()) != n) throw DimensionError("vector has wrong dimension");
  WPoly sum(n);
  for (int a = 0; a < n; ++a) {
    if (xi[a].is_zero()) continue;
    for (int b = 0; b < n; ++b) {
      if (xi[b].is_zero()) continue;
      sum += hessian_entry(f, a, b) * xi[a] * xi[b].conjugate();
    }
  }
  return sum;
}

// Numeric form at a point with a numeric vector.
inline std::complex<double> hessian_apply(const WPoly& f, const Point& at, const std::vector<std::complex<double>>& xi) {
  const int n = f.dim();
  if (static_cast<int>(xi.size()) != n || static_cast<int>(at.size()) != n)
    throw DimensionError("vector has wrong dimension");
  std::complex<double> sum(0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sum += eval(hessian_entry(f, a, b), at) * xi[a] * std::conj(xi[b]);
  return sum;
}

// L_r(v_j) = r_{z_j zbar_j}|r_w|^2 + r_{w wbar}|r_{z_j}|^2 - 2 Re[r_{z_j wbar} r_w r_{zbar_j}].
inline WPoly levi_form(const DefiningFunction& df, int j = 0) {
  const int n = df.dim();
  if (j < 0 || j >= n - 1) throw DimensionError("Levi index out of range");
  const WPoly& r = df.r();
  const WPoly rw = r.deriv(Var::w());
  const WPoly rz = r.deriv(Var::z(j));
  const WPoly cross = r.deriv(Var::z(j), Var::wbar()) * rw * rz.conjugate();
  return r.deriv(Var::z(j), Var::zbar(j)) * rw * rw.conjugate() + r.deriv(Var::w(), Var::wbar()) * rz * rz.conjugate() -
         cross.realify();
}

inline WPoly gradient_zj_sq(const DefiningFunction& df, int j) {
  const WPoly rz = df.r().deriv(Var::z(j));
  return rz * rz.conjugate();
}

// sum_j |r_{z_j}|^2.
inline WPoly gradient_z_sq(const DefiningFunction& df) {
  WPoly sum(df.dim());
  for (int j = 0; j < df.nz(); ++j) sum += gradient_zj_sq(df, j);
  return sum;
}

struct LeviData {
  std::vector<WPoly> levi;            // L_r(v_j), j = 0..n-2
  WPoly gradient_z_sq;                // sum_j |r_{z_j}|^2
  std::vector<std::vector<WPoly>> hessian;  // r_{a bbar}
};

inline LeviData levi_data(const DefiningFunction& df) {
  LeviData d{{}, gradient_z_sq(df), {}};
  for (int j = 0; j < df.nz(); ++j) d.levi.push_back(levi_form(df, j));
  const int n = df.dim();
  d.hessian.assign(n, std::vector<WPoly>(n, WPoly(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) d.hessian[a][b] = hessian_entry(df.r(), a, b);
  return d;
}

}  // namespace pshdf
