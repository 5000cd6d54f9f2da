#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pshdf/boundary.hpp"
#include "pshdf/cr_geometry.hpp"
#include "pshdf/dominance.hpp"
#include "pshdf/evaluate.hpp"
#include "pshdf/linalg.hpp"

namespace pshdf {

inline constexpr double kDefaultTolerance = 1e-9;

// Compiled complex Hessian f_{a bbar}; only a <= b is stored.
class HessianField {
 public:
  HessianField() = default;
  explicit HessianField(const WPoly& f) : n_(f.dim()) {
    for (int a = 0; a < n_; ++a)
      for (int b = a; b < n_; ++b) upper_.emplace_back(hessian_entry(f, a, b));
  }

  int dim() const { return n_; }

  // Row-major n x n Hermitian matrix.
  std::vector<std::complex<double>> operator()(const Point& p) const {
    std::vector<std::complex<double>> h(static_cast<std::size_t>(n_ * n_));
    std::size_t k = 0;
    for (int a = 0; a < n_; ++a)
      for (int b = a; b < n_; ++b) {
        const auto v = upper_[k++](p);
        h[a * n_ + b] = v;
        h[b * n_ + a] = std::conj(v);
      }
    for (int a = 0; a < n_; ++a) h[a * n_ + a] = h[a * n_ + a].real();
    return h;
  }

 private:
  int n_ = 2;
  std::vector<CompiledPoly<>> upper_;
};

// Positivity indicators of one numeric Hessian.
struct PsdValues {
  double diag_z = std::numeric_limits<double>::infinity();  // min_j f_{z_j zbar_j}
  double diag_w = std::numeric_limits<double>::infinity();  // f_{w wbar}
  double minor = std::numeric_limits<double>::infinity();   // min_j H^j
  double least_eigenvalue = std::numeric_limits<double>::infinity();

  double worst() const { return std::min({diag_z, diag_w, minor, least_eigenvalue}); }
};

inline PsdValues psd_values(const std::vector<std::complex<double>>& h, int n) {
  PsdValues v;
  const int w = n - 1;
  v.diag_w = h[w * n + w].real();
  for (int j = 0; j < n - 1; ++j) {
    const double zz = h[j * n + j].real();
    v.diag_z = std::min(v.diag_z, zz);
    v.minor = std::min(v.minor, zz * v.diag_w - std::norm(h[j * n + w]));
  }
  v.least_eigenvalue = least_hermitian_eigenvalue(h, static_cast<std::size_t>(n));
  return v;
}

struct PsdCheckResult {
  bool passed = true;
  double tolerance = kDefaultTolerance;
  std::size_t points_checked = 0;
  PsdValues minima;          // componentwise minima over all points
  Point worst_point;         // point with the smallest indicator
  PsdValues worst_values;    // indicators at worst_point
  std::vector<std::complex<double>> worst_hessian;
};

// Folds one point into a running result.
inline void psd_accumulate(PsdCheckResult& r, const Point& p, const std::vector<std::complex<double>>& h, int n) {
  const PsdValues v = psd_values(h, n);
  r.minima.diag_z = std::min(r.minima.diag_z, v.diag_z);
  r.minima.diag_w = std::min(r.minima.diag_w, v.diag_w);
  r.minima.minor = std::min(r.minima.minor, v.minor);
  r.minima.least_eigenvalue = std::min(r.minima.least_eigenvalue, v.least_eigenvalue);
  if (r.points_checked == 0 || v.worst() < r.worst_values.worst()) {
    r.worst_point = p;
    r.worst_values = v;
    r.worst_hessian = h;
  }
  ++r.points_checked;
  r.passed = r.minima.worst() >= -r.tolerance;
}

inline PsdCheckResult psd_check(const WPoly& f, const std::vector<Point>& points, double tol = kDefaultTolerance) {
  if (!f.is_real()) throw std::invalid_argument("psd_check needs a real-valued function");
  const HessianField H(f);
  PsdCheckResult r;
  r.tolerance = tol;
  for (const auto& p : points) psd_accumulate(r, p, H(p), f.dim());
  return r;
}

inline PsdCheckResult psd_check(const WPoly& f, const BoundaryShell& shell, double tol = kDefaultTolerance) {
  return psd_check(f, shell.points, tol);
}

struct IdentityCheck {
  double max_deviation = 0.0;
  double max_lhs = 0.0;
  std::size_t points = 0;
  Point worst_point;

  double allowed() const { return 1e-8 * (1.0 + max_lhs); }
  bool passed() const { return max_deviation <= allowed(); }
};

// det-minor of the Hessian of (1+Kr+T)r against 2Kh L_r(v_j) + det-minor of
// the Hessian of (1+T)r, with both sides evaluated numerically.
inline IdentityCheck hessian_identity_check(const DefiningFunction& df, const Rational& K, const WPoly& T,
                                           const std::vector<Point>& points) {
  if (!T.is_real()) throw std::invalid_argument("T must be real-valued");
  const int n = df.dim();
  const WPoly& r = df.r();
  const WPoly one = WPoly::constant(n, 1);
  const WPoly h = one + r.scaled(GaussianRational(K)) + T;
  const HessianField lhs_h(h * r), base_h((one + T) * r);
  const CompiledPoly<> hc(h);
  std::vector<CompiledPoly<>> levi;
  for (int j = 0; j < df.nz(); ++j) levi.emplace_back(levi_form(df, j));
  const double k = K.get_d();
  IdentityCheck out;
  for (const auto& p : points) {
    const auto A = lhs_h(p), B = base_h(p);
    const double hv = hc(p).real();
    const int w = n - 1;
    for (int j = 0; j < n - 1; ++j) {
      const double lhs = A[j * n + j].real() * A[w * n + w].real() - std::norm(A[j * n + w]);
      const double rhs = 2.0 * k * hv * levi[j](p).real() + B[j * n + j].real() * B[w * n + w].real() -
                         std::norm(B[j * n + w]);
      const double dev = std::abs(lhs - rhs);
      out.max_lhs = std::max(out.max_lhs, std::abs(lhs));
      if (dev > out.max_deviation || out.points == 0) {
        out.max_deviation = std::max(out.max_deviation, dev);
        out.worst_point = p;
      }
    }
    ++out.points;
  }
  return out;
}

inline IdentityCheck hessian_identity_check(const DefiningFunction& df, const Rational& K, const WPoly& T,
                                           const BoundaryShell& shell) {
  return hessian_identity_check(df, K, T, shell.points);
}

struct InequalityResult {
  std::string name;
  double min_slack = std::numeric_limits<double>::infinity();
  Point worst_point;
  bool holds = true;
};

struct NecessaryConditionsReport {
  std::vector<InequalityResult> inequalities;  // four per tangent index
  double max_abs_E = 0.0;                      // |E| over the shell
  std::vector<DominanceVerdict> e_verdicts;    // one per tangent index
  double tolerance = kDefaultTolerance;

  bool inequalities_hold() const {
    return std::all_of(inequalities.begin(), inequalities.end(), [](const auto& i) { return i.holds; });
  }
  bool passed() const {
    return inequalities_hold() && std::none_of(e_verdicts.begin(), e_verdicts.end(), [](const auto& v) {
             return v.status == DominanceStatus::NotDominated;
           });
  }
};

// P with E = P / (h r_wbar), where E = d/dz_j log h + d/dz_j log r_wbar.
inline WPoly log_derivative_numerator(const DefiningFunction& df, const WPoly& h, int j = 0) {
  const WPoly& r = df.r();
  return h.deriv(Var::z(j)) * r.deriv(Var::wbar()) + h * r.deriv(Var::z(j), Var::wbar());
}

// The four pointwise necessary inequalities for rho = r h to be psh on the
// boundary, plus the log-derivative deviation E and its dominance verdict.
inline NecessaryConditionsReport necessary_conditions_check(const DefiningFunction& df, const WPoly& h,
                                                            const std::vector<Point>& points,
                                                            const DominanceOracle& oracle,
                                                            double tol = kDefaultTolerance) {
  const int n = df.dim(), w = n - 1;
  const WPoly& r = df.r();
  const WPoly rho = r * h;
  const HessianField H(rho);
  const CompiledPoly<> hc(h), rw(r.deriv(Var::w()));
  NecessaryConditionsReport out;
  out.tolerance = tol;

  for (const auto& p : points)
    if (std::abs(hc(p)) < 1e-8) throw ConfigError("h vanishes on the shell");

  static const char* names[] = {
      "2hL/|r_w|^2 + 2 rho_wwbar |r_z|^2/|r_w|^2 - rho_zzbar >= 0",
      "rho_zzbar - rho_wwbar |r_z|^2/(2|r_w|^2) + hL/|r_w|^2 >= 0",
      "rho_zzbar - hL/(2|r_w|^2) + rho_wwbar |r_z|^2/|r_w|^2 >= 0",
      "2 rho_wwbar hL/|r_w|^2 + 2 rho_wwbar^2 |r_z|^2/|r_w|^2 - |rho_zwbar|^2 >= 0",
  };
  for (int j = 0; j < n - 1; ++j) {
    const CompiledPoly<> L(levi_form(df, j)), rz(r.deriv(Var::z(j)));
    const CompiledPoly<> P(log_derivative_numerator(df, h, j)), rwb(r.deriv(Var::wbar()));
    InequalityResult res[4];
    for (int k = 0; k < 4; ++k) res[k].name = (n > 2 ? "[j=" + std::to_string(j + 1) + "] " : std::string()) + names[k];
    for (const auto& p : points) {
      const auto M = H(p);
      const double zz = M[j * n + j].real(), ww = M[w * n + w].real();
      const double zw2 = std::norm(M[j * n + w]);
      const double rw2 = std::norm(rw(p)), rz2 = std::norm(rz(p));
      const double hL = hc(p).real() * L(p).real();
      const double s[4] = {
          2 * hL / rw2 + 2 * ww * rz2 / rw2 - zz,
          zz - ww * rz2 / (2 * rw2) + hL / rw2,
          zz - hL / (2 * rw2) + ww * rz2 / rw2,
          2 * ww * hL / rw2 + 2 * ww * ww * rz2 / rw2 - zw2,
      };
      for (int k = 0; k < 4; ++k)
        if (s[k] < res[k].min_slack) {
          res[k].min_slack = s[k];
          res[k].worst_point = p;
        }
      out.max_abs_E = std::max(out.max_abs_E, std::abs(P(p) / (hc(p) * rwb(p))));
    }
    for (auto& q : res) {
      q.holds = q.min_slack >= -tol;
      out.inequalities.push_back(std::move(q));
    }
    out.e_verdicts.push_back(
        oracle.check(Numerator::abs_square(log_derivative_numerator(df, h, j)), BoundKind::LeviPlusGradSq, j));
  }
  return out;
}

struct LeviScan {
  std::size_t samples = 0;
  std::size_t negatives = 0;
  double min_value = std::numeric_limits<double>::infinity();
  Point min_point;
  std::optional<Point> witness;     // first sample with a negative tangential value
  std::size_t witness_index = 0;    // its position in the sample order
  double radius = 0.0;
};

// Least eigenvalue of the Levi matrix on span{v_1, .., v_{n-1}} at each
// boundary sample; negative beyond round-off marks non-pseudoconvexity.
inline LeviScan levi_scan(const DefiningFunction& df, const BoundaryShell& shell) {
  const int n = df.dim(), m = n - 1;
  const HessianField H(df.r());
  std::vector<CompiledPoly<>> rz;
  for (int j = 0; j < m; ++j) rz.emplace_back(df.r().deriv(Var::z(j)));
  const CompiledPoly<> rw(df.r().deriv(Var::w()));
  std::vector<CompiledPoly<>> levi;
  for (int j = 0; j < m; ++j) levi.emplace_back(levi_form(df, j));
  constexpr double noise = 64 * std::numeric_limits<double>::epsilon();

  LeviScan out;
  out.radius = shell.radius;
  for (const auto& p : shell.points) {
    double value, floor;
    if (m == 1) {
      double mag = 0.0;
      value = levi[0](p, mag).real();
      floor = noise * mag;
    } else {
      const auto M = H(p);
      const auto w = rw(p);
      std::vector<std::vector<std::complex<double>>> v(m, std::vector<std::complex<double>>(n, 0.0));
      for (int j = 0; j < m; ++j) {
        v[j][j] = w;
        v[j][m] = -rz[j](p);
      }
      std::vector<std::complex<double>> L(static_cast<std::size_t>(m * m));
      double scale = 0.0;
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          std::complex<double> s = 0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              s += M[a * n + b] * v[j][a] * std::conj(v[k][b]);
              scale += std::abs(M[a * n + b] * v[j][a] * std::conj(v[k][b]));
            }
          L[j * m + k] = s;
        }
      value = least_hermitian_eigenvalue(L, static_cast<std::size_t>(m));
      floor = noise * scale;
    }
    if (value < out.min_value) {
      out.min_value = value;
      out.min_point = p;
    }
    if (value < -floor) {
      if (!out.witness) {
        out.witness = p;
        out.witness_index = out.samples;
      }
      ++out.negatives;
    }
    ++out.samples;
  }
  return out;
}

// CSV table: coordinates then named value columns.
inline void write_csv(std::ostream& os, const std::vector<Point>& points, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns) {
  if (points.empty()) return;
  const int n = static_cast<int>(points[0].size()), m = n - 1;
  for (int j = 0; j < m; ++j) {
    const std::string z = m == 1 ? "z" : "z" + std::to_string(j + 1);
    os << "re_" << z << ",im_" << z << ',';
  }
  os << "re_w,im_w";
  for (const auto& s : names) os << ',' << s;
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (const auto& c : points[i]) os << c.real() << ',' << c.imag() << (&c == &points[i].back() ? "" : ",");
    for (const auto& col : columns) os << ',' << col[i];
    os << '\n';
  }
}

}  // namespace pshdf
