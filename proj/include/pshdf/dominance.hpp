#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "pshdf/boundary.hpp"
#include "pshdf/cr_geometry.hpp"
#include "pshdf/evaluate.hpp"

namespace pshdf {

// Right-hand side of |P|^2 <= C * bound.
enum class BoundKind { LeviPlusGradSq, LeviOnly };

inline std::string to_string(BoundKind b) { return b == BoundKind::LeviOnly ? "levi" : "levi+grad"; }

inline BoundKind parse_bound(const std::string& s) {
  if (s == "levi") return BoundKind::LeviOnly;
  if (s == "levi+grad") return BoundKind::LeviPlusGradSq;
  throw ConfigError("unknown bound '" + s + "' (expected levi or levi+grad)");
}

enum class DominanceStatus { Dominated, NotDominated, Unknown };

inline std::string to_string(DominanceStatus s) {
  switch (s) {
    case DominanceStatus::Dominated: return "Dominated";
    case DominanceStatus::NotDominated: return "NotDominated";
    default: return "Unknown";
  }
}

// The compared quantity: either sum |P_i|^2, or max(-f, 0) for a real f.
struct Numerator {
  enum class Kind { AbsSquare, NegativePart };
  Kind kind = Kind::AbsSquare;
  std::vector<WPoly> polys;

  static Numerator abs_square(WPoly p) { return {Kind::AbsSquare, {std::move(p)}}; }
  static Numerator abs_square(std::vector<WPoly> ps) { return {Kind::AbsSquare, std::move(ps)}; }
  static Numerator negative_part(WPoly f) { return {Kind::NegativePart, {std::move(f)}}; }

  bool is_zero() const {
    return std::all_of(polys.begin(), polys.end(), [](const WPoly& p) { return p.is_zero(); });
  }
};

struct ProbeConfig {
  std::uint64_t seed = 1;
  std::vector<double> shells = default_shells();
  int fixed_rays = 16;
  int random_rays = 32;
  int max_exponent = 4;
  int phases = 16;
  int refine_top = 4;
  double growth = 1.5;   // per-shell factor that counts as escape
  int escape_run = 4;    // consecutive shell values in an escape
  double stability = 1.1;

  static std::vector<double> default_shells() {
    std::vector<double> s;
    for (int k = 3; k <= 16; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
  }
};

// Point (c_k t^{e_k}) in tangential coordinates (x_1, y_1, .., u); Im w is
// then solved on the boundary.
struct Probe {
  std::vector<double> coeffs;
  std::vector<int> exponents;
  std::string label;
  bool is_ray = false;

  std::vector<double> tangential(double t) const {
    std::vector<double> c(coeffs.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = coeffs[k] * std::pow(t, exponents[k]);
    return c;
  }
};

namespace detail {

inline void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  if (s > 0)
    for (double& x : v) x /= s;
}

inline double halton(std::uint64_t i, int base) {
  double f = 1.0, x = 0.0;
  for (; i > 0; i /= base) {
    f /= base;
    x += f * static_cast<double>(i % base);
  }
  return x;
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string describe(const Probe& p, int m) {
  std::string s = p.is_ray ? "ray" : "curve";
  s += " ";
  for (int j = 0; j < m; ++j) {
    s += (m == 1 ? std::string("z") : "z" + std::to_string(j + 1)) + " = (" + fmt(p.coeffs[2 * j]) + " + " +
         fmt(p.coeffs[2 * j + 1]) + "i) t^" + std::to_string(p.exponents[2 * j]) + ", ";
  }
  s += "Re w = " + fmt(p.coeffs[2 * m]) + " t^" + std::to_string(p.exponents[2 * m]);
  return s;
}

}  // namespace detail

// Rays and monomial curves with their boundary projections on every shell.
class ProbeFamily {
 public:
  ProbeFamily(const DefiningFunction& df, ProbeConfig cfg = {}) : df_(df), cfg_(std::move(cfg)), proj_(df) {
    if (cfg_.shells.size() < static_cast<std::size_t>(cfg_.escape_run))
      throw ConfigError("probe family needs at least " + std::to_string(cfg_.escape_run) + " shells");
    std::sort(cfg_.shells.begin(), cfg_.shells.end(), std::greater<>());
    build_rays();
    build_curves();
    points_.resize(probes_.size());
    std::size_t good = 0;
    for (std::size_t p = 0; p < probes_.size(); ++p) {
      points_[p].reserve(cfg_.shells.size());
      for (double t : cfg_.shells) {
        points_[p].push_back(project(probes_[p], t));
        if (points_[p].back()) ++good;
      }
    }
    if (good == 0) throw ConfigError("degenerate probe family: no probe point projects onto the boundary");
  }

  const DefiningFunction& df() const { return df_; }
  const ProbeConfig& config() const { return cfg_; }
  const std::vector<double>& shells() const { return cfg_.shells; }
  const std::vector<Probe>& probes() const { return probes_; }
  const std::optional<Point>& point(std::size_t probe, std::size_t shell) const { return points_[probe][shell]; }
  int nz() const { return df_.nz(); }

  std::optional<Point> project(const Probe& p, double t) const { return proj_.project_real(p.tangential(t)); }

  // Projected points at shells with parameter <= radius (and norm <= radius).
  std::vector<Point> points_within(double radius) const {
    std::vector<Point> out;
    for (const auto& row : points_)
      for (const auto& pt : row)
        if (pt && norm(*pt) <= radius) out.push_back(*pt);
    return out;
  }

 private:
  void build_rays() {
    const int d = 2 * df_.nz() + 1;
    std::vector<std::vector<double>> dirs;
    for (int k = 0; k < d && static_cast<int>(dirs.size()) < cfg_.fixed_rays; ++k) {
      for (double s : {1.0, -1.0}) {
        if (static_cast<int>(dirs.size()) >= cfg_.fixed_rays) break;
        std::vector<double> v(d, 0.0);
        v[k] = s;
        dirs.push_back(v);
      }
    }
    static constexpr int bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    for (std::uint64_t i = 1; static_cast<int>(dirs.size()) < cfg_.fixed_rays; ++i) {
      std::vector<double> v(d);
      for (int k = 0; k < d; ++k) v[k] = 2.0 * detail::halton(i, bases[k % 16]) - 1.0;
      detail::normalize(v);
      dirs.push_back(v);
    }
    std::mt19937_64 rng(cfg_.seed);
    std::normal_distribution<double> g;
    for (int r = 0; r < cfg_.random_rays; ++r) {
      std::vector<double> v(d);
      for (double& x : v) x = g(rng);
      detail::normalize(v);
      dirs.push_back(v);
    }
    for (auto& v : dirs) {
      Probe p{v, std::vector<int>(d, 1), "", true};
      p.label = detail::describe(p, df_.nz());
      probes_.push_back(std::move(p));
    }
  }

  void build_curves() {
    const int m = df_.nz(), d = 2 * m + 1;
    const int E = cfg_.max_exponent;
    if (E < 1 || cfg_.phases < 1) return;
    std::vector<int> ex(m + 1, 1);
    for (;;) {
      for (int k = 0; k < cfg_.phases; ++k) {
        for (double sigma : {1.0, -1.0}) {
          Probe p;
          p.coeffs.resize(d);
          p.exponents.resize(d);
          for (int j = 0; j < m; ++j) {
            const int kj = (k * (2 * j + 1)) % cfg_.phases;
            const double th = 2.0 * std::numbers::pi * kj / cfg_.phases;
            p.coeffs[2 * j] = std::cos(th);
            p.coeffs[2 * j + 1] = std::sin(th);
            p.exponents[2 * j] = p.exponents[2 * j + 1] = ex[j];
          }
          p.coeffs[2 * m] = sigma;
          p.exponents[2 * m] = ex[m];
          detail::normalize(p.coeffs);
          p.label = detail::describe(p, m);
          probes_.push_back(std::move(p));
        }
      }
      int pos = 0;
      while (pos <= m && ++ex[pos] > E) ex[pos++] = 1;
      if (pos > m) break;
    }
  }

  DefiningFunction df_;
  ProbeConfig cfg_;
  BoundaryProjector proj_;
  std::vector<Probe> probes_;
  std::vector<std::vector<std::optional<Point>>> points_;
};

struct SampleRow {
  double t = 0.0;
  double numerator = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  Point point;
};

struct Witness {
  Probe curve;
  std::vector<SampleRow> table;
  std::size_t run_begin = 0;  // escape run within table
  std::size_t run_end = 0;    // one past the end
};

struct DominanceVerdict {
  DominanceStatus status = DominanceStatus::Unknown;
  BoundKind bound = BoundKind::LeviPlusGradSq;
  double constant = std::numeric_limits<double>::quiet_NaN();  // valid when Dominated
  std::string certificate;                                     // sufficient check that fired, if any
  std::optional<Witness> witness;                              // when NotDominated
  std::vector<double> shell_sup;                               // per-shell supremum of the ratio
  std::string note;

  bool dominated() const { return status == DominanceStatus::Dominated; }
};

// Value of f restricted to the boundary, to second order in the tangential
// coordinates X = (x_1, y_1, .., x_{n-1}, y_{n-1}, u): f0 + lin.X + X^T Q X.
struct BoundaryQuadratic {
  Rational f0;
  std::vector<Rational> lin;
  std::vector<std::vector<Rational>> quad;
};

// Uses Im w = -F_2(X) + O(|X|^3) on the boundary.
inline BoundaryQuadratic boundary_quadratic(const WPoly& f, const DefiningFunction& df) {
  const int m = df.nz(), d = 2 * m + 1;
  const auto fr = f.real_coordinates();
  const auto F = df.higher_order_part().real_coordinates();
  BoundaryQuadratic out{0, std::vector<Rational>(d, 0), std::vector<std::vector<Rational>>(d, std::vector<Rational>(d, 0))};
  Rational bv = 0;
  for (const auto& [e, c] : fr.terms()) {
    const int deg = total_degree(e);
    if (deg == 0) out.f0 = c.re();
    if (deg == 1) {
      for (int k = 0; k <= d; ++k)
        if (e[k] == 1) (k == d ? bv : out.lin[k]) = c.re();
    }
    if (deg == 2 && e[d] == 0) {
      std::vector<int> idx;
      for (int k = 0; k < d; ++k)
        for (int r = 0; r < e[k]; ++r) idx.push_back(k);
      if (idx[0] == idx[1])
        out.quad[idx[0]][idx[0]] += c.re();
      else {
        out.quad[idx[0]][idx[1]] += c.re() / 2;
        out.quad[idx[1]][idx[0]] += c.re() / 2;
      }
    }
  }
  if (sgn(bv) != 0) {
    for (const auto& [e, c] : F.terms()) {
      if (total_degree(e) != 2 || e[d] != 0) continue;
      std::vector<int> idx;
      for (int k = 0; k < d; ++k)
        for (int r = 0; r < e[k]; ++r) idx.push_back(k);
      const Rational v = -bv * c.re();
      if (idx[0] == idx[1])
        out.quad[idx[0]][idx[0]] += v;
      else {
        out.quad[idx[0]][idx[1]] += v / 2;
        out.quad[idx[1]][idx[0]] += v / 2;
      }
    }
  }
  return out;
}

// Exact positive definiteness by rational LDL^T (all pivots > 0).
inline bool positive_definite(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (sgn(a[k][k]) <= 0) return false;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return true;
}

// Largest eps in {1/2, .., 1/256} with Q - eps*I positive definite.
inline std::optional<Rational> quadratic_margin(const std::vector<std::vector<Rational>>& q) {
  for (int k = 1; k <= 8; ++k) {
    const Rational eps = make_rational(1, 1L << k);
    auto a = q;
    for (std::size_t i = 0; i < a.size(); ++i) a[i][i] -= eps;
    if (positive_definite(a)) return eps;
  }
  return std::nullopt;
}

// Three-valued oracle for |P|^2 <= C * bound near the origin on the
// boundary. Probe projections are cached and shared by all checks.
class DominanceOracle {
 public:
  explicit DominanceOracle(const DefiningFunction& df, ProbeConfig cfg = {}) : family_(df, std::move(cfg)) {
    for (int j = 0; j < df.nz(); ++j) {
      levi_.push_back(levi_form(df, j));
      grad_.push_back(gradient_zj_sq(df, j));
      levi_c_.emplace_back(levi_.back());
      grad_c_.emplace_back(grad_.back());
    }
  }

  const ProbeFamily& family() const { return family_; }
  const DefiningFunction& df() const { return family_.df(); }

  WPoly bound_poly(BoundKind b, int j = 0) const {
    check_index(j);
    return b == BoundKind::LeviOnly ? levi_[j] : levi_[j] + grad_[j];
  }

  // Ratio numerator / bound at a boundary point; +inf when the bound
  // vanishes against a positive numerator, NaN when both vanish.
  struct Evaluator {
    const DominanceOracle* oracle;
    Numerator::Kind kind;
    std::vector<CompiledPoly<>> polys;
    BoundKind bound;
    int j;

    SampleRow row(const Point& p, double t) const {
      constexpr double noise = 64 * std::numeric_limits<double>::epsilon();
      SampleRow s{t, 0.0, 0.0, 0.0, p};
      double mag = 0.0;
      if (kind == Numerator::Kind::AbsSquare) {
        for (const auto& c : polys) {
          const std::complex<double> v = c(p, mag);
          if (std::abs(v) > noise * mag) s.numerator += std::norm(v);
        }
      } else {
        const double v = -polys[0](p, mag).real();
        s.numerator = v > noise * mag ? v : 0.0;
      }
      double lm = 0.0;
      s.bound = oracle->levi_c_[j](p, lm).real();
      double bm = lm;
      if (bound == BoundKind::LeviPlusGradSq) {
        double gm = 0.0;
        s.bound += oracle->grad_c_[j](p, gm).real();
        bm += gm;
      }
      const bool bound_zero = s.bound <= noise * bm;
      if (bound_zero)
        s.ratio = s.numerator > 0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
      else
        s.ratio = s.numerator / s.bound;
      return s;
    }
  };

  Evaluator evaluator(const Numerator& num, BoundKind bound, int j = 0) const {
    check_index(j);
    Evaluator e{this, num.kind, {}, bound, j};
    for (const auto& p : num.polys) e.polys.emplace_back(p);
    if (e.polys.empty()) e.polys.emplace_back(WPoly(df().dim()));
    return e;
  }

  std::vector<SampleRow> table(const Evaluator& ev, const Probe& probe) const {
    std::vector<SampleRow> rows;
    for (double t : family_.shells()) {
      auto p = family_.project(probe, t);
      if (p)
        rows.push_back(ev.row(*p, t));
      else
        rows.push_back({t, 0.0, 0.0, std::numeric_limits<double>::quiet_NaN(), {}});
    }
    return rows;
  }

  DominanceVerdict check(const Numerator& num, BoundKind bound, int j = 0) const {
    check_index(j);
    DominanceVerdict v;
    v.bound = bound;
    if (num.is_zero()) {
      v.status = DominanceStatus::Dominated;
      v.constant = 0.0;
      v.certificate = "numerator vanishes identically";
      return v;
    }
    v.certificate = certificate(num, bound, j);
    const Evaluator ev = evaluator(num, bound, j);
    const auto& shells = family_.shells();
    const std::size_t ns = shells.size();

    std::vector<std::vector<SampleRow>> tables;
    std::vector<Probe> probes;
    tables.reserve(family_.probes().size());
    for (std::size_t p = 0; p < family_.probes().size(); ++p) {
      std::vector<SampleRow> rows;
      rows.reserve(ns);
      for (std::size_t s = 0; s < ns; ++s) {
        const auto& pt = family_.point(p, s);
        if (pt)
          rows.push_back(ev.row(*pt, shells[s]));
        else
          rows.push_back({shells[s], 0.0, 0.0, std::numeric_limits<double>::quiet_NaN(), {}});
      }
      tables.push_back(std::move(rows));
      probes.push_back(family_.probes()[p]);
    }

    if (v.certificate.empty()) refine(ev, probes, tables);

    v.shell_sup.assign(ns, 0.0);
    for (const auto& rows : tables)
      for (std::size_t s = 0; s < ns; ++s)
        if (!std::isnan(rows[s].ratio)) v.shell_sup[s] = std::max(v.shell_sup[s], rows[s].ratio);

    double inner_max = 0.0;
    for (std::size_t s = ns / 2; s < ns; ++s) inner_max = std::max(inner_max, v.shell_sup[s]);

    if (!v.certificate.empty()) {
      v.status = DominanceStatus::Dominated;
      v.constant = std::isfinite(inner_max) ? 2.0 * inner_max : std::numeric_limits<double>::infinity();
      return v;
    }

    // Escape: the longest growth run; ties prefer finite ratios, then rays
    // (the simplest witness), then the larger final ratio.
    std::optional<Witness> best;
    auto finite_count = [](const Witness& w) {
      std::size_t c = 0;
      for (std::size_t k = w.run_begin; k < w.run_end; ++k) c += std::isfinite(w.table[k].ratio) ? 1 : 0;
      return c;
    };
    for (std::size_t p = 0; p < tables.size(); ++p) {
      auto [b, e] = longest_growth_run(tables[p]);
      if (e - b < static_cast<std::size_t>(family_.config().escape_run)) continue;
      Witness cand{probes[p], tables[p], b, e};
      if (!best) {
        best = std::move(cand);
        continue;
      }
      const auto key = [&](const Witness& w) {
        return std::make_tuple(w.run_end - w.run_begin, finite_count(w), w.curve.is_ray ? 1 : 0,
                               w.table[w.run_end - 1].ratio);
      };
      if (key(cand) > key(*best)) best = std::move(cand);
    }
    if (best) {
      v.status = DominanceStatus::NotDominated;
      v.witness = std::move(best);
      return v;
    }

    const double last = v.shell_sup[ns - 1], prev = v.shell_sup[ns - 2];
    const bool stable = std::isfinite(inner_max) && last <= family_.config().stability * prev + 0.0;
    if (stable || (std::isfinite(inner_max) && last == 0.0)) {
      v.status = DominanceStatus::Dominated;
      v.constant = 2.0 * inner_max;
      v.note = "numeric: supremum stable across the two innermost shells";
    } else {
      v.status = DominanceStatus::Unknown;
      v.note = std::isfinite(inner_max) ? "supremum not stable across the two innermost shells"
                                        : "bound vanishes against a positive numerator at some inner probe";
    }
    return v;
  }

  // Re-evaluates a stored witness curve; true when the escape reproduces.
  bool replay(const Witness& w, const Numerator& num, BoundKind bound, int j = 0) const {
    const Evaluator ev = evaluator(num, bound, j);
    std::vector<SampleRow> rows;
    for (const auto& r : w.table) {
      auto p = family_.project(w.curve, r.t);
      rows.push_back(p ? ev.row(*p, r.t) : SampleRow{r.t, 0, 0, std::numeric_limits<double>::quiet_NaN(), {}});
    }
    auto [b, e] = longest_growth_run(rows);
    return e - b >= static_cast<std::size_t>(family_.config().escape_run);
  }

  std::pair<std::size_t, std::size_t> longest_growth_run(const std::vector<SampleRow>& rows) const {
    const double g = family_.config().growth;
    std::size_t best_b = 0, best_e = 0, b = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const double cur = rows[k].ratio;
      bool extends = false;
      if (k > b && !std::isnan(cur) && cur > 0) {
        const double prev = rows[k - 1].ratio;
        extends = std::isinf(cur) || (std::isfinite(prev) && cur >= g * prev);
      }
      if (!extends) b = k;
      if (std::isnan(cur)) {
        b = k + 1;
        continue;
      }
      if (k + 1 - b > best_e - best_b) {
        best_b = b;
        best_e = k + 1;
      }
    }
    return {best_b, best_e};
  }

 private:
  void check_index(int j) const {
    if (j < 0 || j >= df().nz()) throw DimensionError("bound index out of range");
  }

  std::string certificate(const Numerator& num, BoundKind bound, int j) const {
    const WPoly B = bound_poly(bound, j);
    const auto bq = boundary_quadratic(B, df());
    if (sgn(bq.f0) > 0) return "bound is positive at the origin";

    if (num.kind == Numerator::Kind::NegativePart) {
      const Rational f0 = num.polys[0].constant_term().re();
      if (sgn(f0) > 0) return "numerator is negative near the origin";
    }
    for (const auto& p : num.polys)
      if (!p.constant_term().is_zero()) return {};
    if (num.kind == Numerator::Kind::NegativePart) {
      const auto fq = boundary_quadratic(num.polys[0], df());
      for (const auto& c : fq.lin)
        if (sgn(c) != 0) return {};
    }
    if (sgn(bq.f0) != 0) return {};
    for (const auto& c : bq.lin)
      if (sgn(c) != 0) return {};
    auto eps = quadratic_margin(bq.quad);
    if (!eps) return {};
    return "bound >= " + eps->get_str() + "*|X|^2 to second order on the boundary and the numerator vanishes at the origin";
  }

  // Pattern search on the coefficient vector at the innermost shell,
  // maximizing the ratio; refined probes are appended.
  void refine(const Evaluator& ev, std::vector<Probe>& probes, std::vector<std::vector<SampleRow>>& tables) const {
    const std::size_t last = family_.shells().size() - 1;
    const double t = family_.shells()[last];
    std::vector<std::size_t> order(tables.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    auto key = [&](std::size_t k) {
      const double r = tables[k][last].ratio;
      return std::isnan(r) ? -1.0 : r;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });

    std::vector<std::size_t> picks;
    for (std::size_t k = 0; k < order.size() && static_cast<int>(picks.size()) < family_.config().refine_top; ++k)
      picks.push_back(order[k]);
    for (std::size_t k : order)
      if (probes[k].is_ray) {
        if (std::find(picks.begin(), picks.end(), k) == picks.end()) picks.push_back(k);
        break;
      }

    auto objective = [&](const Probe& pr) {
      auto p = family_.project(pr, t);
      if (!p) return -1.0;
      const double r = ev.row(*p, t).ratio;
      return std::isnan(r) ? -1.0 : r;
    };

    const std::size_t base = probes.size();
    for (std::size_t k : picks) {
      if (k >= base) continue;
      Probe cur = probes[k];
      double fcur = objective(cur);
      if (std::isinf(fcur) || fcur <= 0) continue;
      int evals = 0;
      for (double step = 0.25; step > 1e-13 && evals < 6000; step *= 0.5) {
        bool improved = true;
        while (improved && evals < 6000) {
          improved = false;
          for (std::size_t c = 0; c < cur.coeffs.size(); ++c) {
            for (double sgn_ : {1.0, -1.0}) {
              Probe cand = cur;
              cand.coeffs[c] += sgn_ * step;
              detail::normalize(cand.coeffs);
              const double f = objective(cand);
              ++evals;
              if (f > fcur) {
                cur = std::move(cand);
                fcur = f;
                improved = true;
              }
            }
          }
          if (std::isinf(fcur)) break;
        }
        if (std::isinf(fcur)) break;
      }
      cur.label = "refined " + detail::describe(cur, family_.nz());
      tables.push_back(table(ev, cur));
      probes.push_back(std::move(cur));
    }
  }

  ProbeFamily family_;
  std::vector<WPoly> levi_, grad_;
  std::vector<CompiledPoly<>> levi_c_, grad_c_;
};

inline DominanceVerdict dominance_check(const WPoly& P, BoundKind bound, const DominanceOracle& oracle, int j = 0) {
  return oracle.check(Numerator::abs_square(P), bound, j);
}

inline DominanceVerdict dominance_check(const WPoly& P, BoundKind bound, const DefiningFunction& df,
                                        const ProbeConfig& cfg = {}, int j = 0) {
  return DominanceOracle(df, cfg).check(Numerator::abs_square(P), bound, j);
}

struct TermVerdict {
  WPoly term;
  DominanceVerdict verdict;
  bool in_s = false;
};

struct SplitResult {
  WPoly S;
  WPoly E;
  std::vector<TermVerdict> terms;
  BoundKind bound = BoundKind::LeviPlusGradSq;
  bool has_unknown = false;  // Unknown terms kept in S
};

// Per-monomial split g = S + E: dominated monomials go to E.
inline SplitResult split_S_E(const WPoly& g, const DominanceOracle& oracle, BoundKind bound, int j = 0) {
  const int n = g.dim();
  SplitResult out{WPoly(n), WPoly(n), {}, bound, false};
  for (const auto& [e, c] : g.terms()) {
    SparsePoly<GaussianRational> m(WPoly::nslots(n));
    m.add_term(e, c);
    WPoly term(n, m);
    auto v = oracle.check(Numerator::abs_square(term), bound, j);
    const bool to_s = !v.dominated();
    if (v.status == DominanceStatus::Unknown) out.has_unknown = true;
    (to_s ? out.S : out.E) += term;
    out.terms.push_back({std::move(term), std::move(v), to_s});
  }
  return out;
}

// Whether sum_j |r_{z_j}|^2 <= C L_r; worst verdict over the tangent basis.
inline DominanceVerdict levi_dominance_gate(const DominanceOracle& oracle) {
  std::vector<WPoly> rz;
  for (int j = 0; j < oracle.df().nz(); ++j) rz.push_back(oracle.df().r().deriv(Var::z(j)));
  DominanceVerdict worst;
  for (int j = 0; j < oracle.df().nz(); ++j) {
    auto v = oracle.check(Numerator::abs_square(rz), BoundKind::LeviOnly, j);
    if (j == 0 || v.status == DominanceStatus::NotDominated ||
        (v.status == DominanceStatus::Unknown && worst.status == DominanceStatus::Dominated))
      worst = std::move(v);
  }
  return worst;
}

// Whether -H^j_{(1+T)r} <= C L_r(v_j) near the origin.
inline DominanceVerdict threshold_check(const DominanceOracle& oracle, const WPoly& T, int j = 0) {
  const WPoly f = (WPoly::constant(T.dim(), 1) + T) * oracle.df().r();
  return oracle.check(Numerator::negative_part(hessian_minor_det(f, j)), BoundKind::LeviOnly, j);
}

}  // namespace pshdf
