#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pshdf/boundary.hpp"
#include "pshdf/cr_geometry.hpp"
#include "pshdf/dominance.hpp"
#include "pshdf/numeric_verify.hpp"

namespace pshdf {

class NotPseudoconvexError : public std::runtime_error {
 public:
  NotPseudoconvexError(const std::string& what, Point witness, double value)
      : std::runtime_error(what), witness_(std::move(witness)), value_(value) {}
  const Point& witness() const { return witness_; }
  double value() const { return value_; }

 private:
  Point witness_;
  double value_;
};

struct StageSolution {
  WPoly T_inc;
  WPoly residual;
  WPoly Q;  // antiderivative of 2iS in z_j
};

// T_z = 2iS via T = Q + conj(Q); the conjugate half leaves a residual.
inline StageSolution solve_stage(const WPoly& S, int j = 0) {
  const WPoly Q = S.scaled(GaussianRational(0, 2)).antiderivative_z(j);
  return {Q.realify(), Q.conjugate().deriv(Var::z(j)), Q};
}

struct AbsorbResult {
  WPoly T;
  std::vector<WPoly> absorbed;
};

namespace detail {

// Degree in (z_j, zbar_j) for each j, then in (w, wbar).
inline std::vector<int> group_key(const Exponents& e, int n) {
  const int m = n - 1;
  std::vector<int> key(m + 1);
  for (int j = 0; j < m; ++j) key[j] = e[j] + e[m + j];
  key[m] = e[2 * m] + e[2 * m + 1];
  return key;
}

inline std::map<std::vector<int>, WPoly> groups(const WPoly& p) {
  std::map<std::vector<int>, WPoly> out;
  for (const auto& [e, c] : p.terms()) {
    auto key = group_key(e, p.dim());
    auto it = out.try_emplace(key, WPoly(p.dim())).first;
    SparsePoly<GaussianRational> m(WPoly::nslots(p.dim()));
    m.add_term(e, c);
    it->second += WPoly(p.dim(), m);
  }
  return out;
}

}  // namespace detail

// Drops every group of T (same bidegree in each variable pair) that is an
// exact rational multiple of the corresponding group of r: such terms are
// multiples of r's own terms and may be absorbed.
inline AbsorbResult absorb_r_multiples(const WPoly& T, const DefiningFunction& df) {
  const auto rg = detail::groups(df.r());
  AbsorbResult out{T, {}};
  for (const auto& [key, tg] : detail::groups(T)) {
    auto it = rg.find(key);
    if (it == rg.end()) continue;
    const auto& [e0, c0] = *it->second.terms().begin();
    const GaussianRational lambda = tg.coeff(e0) / c0;
    if (lambda.is_zero() || !lambda.is_real()) continue;
    if (it->second.scaled(lambda) != tg) continue;
    out.T -= tg;
    out.absorbed.push_back(tg);
  }
  return out;
}

struct MultiplierCandidate {
  WPoly T{2};
  std::optional<Rational> K;
  int stage = 0;
  WPoly residual{2};
  std::vector<WPoly> absorbed;

  WPoly h(const DefiningFunction& df) const {
    WPoly out = WPoly::constant(df.dim(), 1) + T;
    if (K) out += df.r().scaled(GaussianRational(*K));
    return out;
  }
};

// Exact check at the origin: every L_r(v_j)(0) > 0 means T = 0 solves the
// log-derivative equation up to error terms.
inline std::optional<MultiplierCandidate> strong_psc_shortcut(const DefiningFunction& df) {
  for (int j = 0; j < df.nz(); ++j)
    if (sgn(levi_form(df, j).constant_term().re()) <= 0) return std::nullopt;
  MultiplierCandidate c;
  c.T = WPoly(df.dim());
  c.residual = WPoly(df.dim());
  return c;
}

struct KSearchConfig {
  double radius = 1e-2;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  int max_K_exp = 20;
  double tol = kDefaultTolerance;
};

struct KSearchResult {
  bool found = false;
  int exponent = -1;  // K = 2^exponent
  Rational K{0};
  double requested_radius = 0.0;
  double radius = 0.0;      // radius of the shell actually used
  int shell_shrinks = 0;    // retries at radius / 4
  std::size_t samples = 0;  // shell samples (probe points come on top)
  std::uint64_t seed = 0;
  PsdCheckResult psd;       // at the accepted K, or at the largest K
  DominanceVerdict gate;    // -H_{(1+T)r} against L_r
  double min_abs_h = 0.0;
  std::string failure;      // human-readable reason when not found
};

namespace detail {

inline std::vector<Point> witness_curve_points(const DominanceOracle& oracle, const Witness& w, double radius) {
  std::vector<Point> out;
  const auto& sh = oracle.family().shells();
  const double t_hi = sh.front(), t_lo = sh.back();
  for (int k = 0; k <= 400; ++k) {
    const double t = t_hi * std::pow(t_lo / t_hi, k / 400.0);
    auto p = oracle.family().project(w.curve, t);
    if (p && norm(*p) <= radius) out.push_back(std::move(*p));
  }
  return out;
}

}  // namespace detail

// Smallest K = 2^e with (1+Kr+T)r PSD on the shell and -H_{(1+T)r} not
// escaping L_r; the shell shrinks once by 4 before giving up.
inline KSearchResult k_search(const DominanceOracle& oracle, const WPoly& T, const KSearchConfig& cfg) {
  if (!T.is_real()) throw std::invalid_argument("T must be real-valued");
  const DefiningFunction& df = oracle.df();
  const int n = df.dim();
  KSearchResult out;
  out.requested_radius = cfg.radius;
  out.samples = cfg.samples;
  out.seed = cfg.seed;

  for (int j = 0; j < df.nz(); ++j) {
    auto v = threshold_check(oracle, T, j);
    if (j == 0 || v.status == DominanceStatus::NotDominated ||
        (v.status == DominanceStatus::Unknown && out.gate.status == DominanceStatus::Dominated))
      out.gate = std::move(v);
  }
  const bool gate_blocks = out.gate.status == DominanceStatus::NotDominated;

  const WPoly base = (WPoly::constant(n, 1) + T) * df.r();
  const HessianField A(base), B(df.r() * df.r());
  const CompiledPoly<> p1(WPoly::constant(n, 1) + T);

  double radius = cfg.radius;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const BoundaryShell shell = sample_boundary(df, radius, cfg.samples, cfg.seed);
    out.radius = shell.radius;
    out.shell_shrinks = attempt;
    std::vector<Point> pts = shell.points;
    for (auto& p : oracle.family().points_within(shell.radius)) pts.push_back(std::move(p));
    if (gate_blocks && out.gate.witness)
      for (auto& p : detail::witness_curve_points(oracle, *out.gate.witness, shell.radius)) pts.push_back(std::move(p));

    out.min_abs_h = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) out.min_abs_h = std::min(out.min_abs_h, std::abs(p1(p)));
    if (out.min_abs_h < 0.5) {
      out.failure = "h = 1 + T comes within 1/2 of zero on the shell";
      radius /= 4;
      continue;
    }

    std::vector<std::vector<std::complex<double>>> a, b;
    a.reserve(pts.size());
    b.reserve(pts.size());
    for (const auto& p : pts) {
      a.push_back(A(p));
      b.push_back(B(p));
    }
    for (int e = 0; e <= cfg.max_K_exp; ++e) {
      const double K = std::ldexp(1.0, e);
      PsdCheckResult r;
      r.tolerance = cfg.tol;
      std::vector<std::complex<double>> h(static_cast<std::size_t>(n * n));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t k = 0; k < h.size(); ++k) h[k] = a[i][k] + K * b[i][k];
        psd_accumulate(r, pts[i], h, n);
      }
      out.psd = std::move(r);
      if (out.psd.passed && !gate_blocks) {
        out.found = true;
        out.exponent = e;
        out.K = Rational(mpz_class(1) << e);
        out.failure.clear();
        return out;
      }
    }
    out.exponent = cfg.max_K_exp;
    out.K = Rational(mpz_class(1) << cfg.max_K_exp);
    if (gate_blocks)
      out.failure = "-det H_{(1+T)r} is not dominated by the Levi form (escape along " +
                    out.gate.witness->curve.label + ")";
    else
      out.failure = "Hessian of (1+Kr+T)r not PSD for any K <= 2^" + std::to_string(cfg.max_K_exp);
    radius /= 4;
  }
  return out;
}

struct StageRecord {
  int index = 0;
  WPoly candidate_T{2};          // T tested by k_search at this stage
  std::vector<WPoly> absorbed;   // removed from the working T for the candidate
  KSearchResult k;
  bool escalated = false;        // bound widened to LeviOnly at this stage
  BoundKind bound = BoundKind::LeviPlusGradSq;
  std::vector<WPoly> g;          // (rho_n)_{z_j wbar} per j
  std::vector<SplitResult> split;
  std::vector<WPoly> T_inc;      // per j
  std::vector<WPoly> residual;   // per j
  std::vector<std::optional<DominanceVerdict>> residual_verdicts;
  WPoly merged_T_inc{2};
  WPoly T_after{2};              // working T after adding and truncating
  bool solved = false;           // a T increment was produced
};

enum class ConstructionStatus { Certified, Obstructed, Exhausted };

inline std::string to_string(ConstructionStatus s) {
  switch (s) {
    case ConstructionStatus::Certified: return "Certified";
    case ConstructionStatus::Obstructed: return "Obstructed";
    default: return "Exhausted";
  }
}

enum class PseudoconvexPolicy { Error, Warn, Skip };

struct ConstructionConfig {
  int max_stages = 4;
  std::optional<int> degree_cap;
  ProbeConfig probes;
  KSearchConfig k;
  BoundKind bound = BoundKind::LeviPlusGradSq;
  bool escalate = true;  // widen to LeviOnly when the split leaves S = 0
  bool absorb = true;
  PseudoconvexPolicy pseudoconvex = PseudoconvexPolicy::Error;
};

struct ConsistencyIssue {
  int j = 0, k = 0;
  std::vector<WPoly> terms;
  std::string detail;
};

struct ConstructionReport {
  ConstructionStatus status = ConstructionStatus::Exhausted;
  int dim = 2;
  WPoly r{2};
  std::vector<StageRecord> stages;
  MultiplierCandidate final;
  bool shortcut_applicable = false;
  BoundKind initial_bound = BoundKind::LeviPlusGradSq;
  BoundKind final_bound = BoundKind::LeviPlusGradSq;
  int degree_cap = 0;
  std::optional<IdentityCheck> identity;
  std::vector<double> contraction;  // max |S_{n+1}| / |S_n| per solved stage
  std::vector<ConsistencyIssue> conflicts;
  std::string message;
  std::optional<std::string> warning;
  std::optional<Point> levi_witness;
  ConstructionConfig config;
};

namespace detail {

inline double max_abs_ratio(const WPoly& num, const WPoly& den, const std::vector<Point>& pts) {
  const CompiledPoly<> a(num), b(den);
  constexpr double noise = 64 * std::numeric_limits<double>::epsilon();
  double worst = 0.0;
  for (const auto& p : pts) {
    double mag = 0.0;
    const double d = std::abs(b(p, mag));
    if (d <= noise * mag || d == 0.0) continue;
    worst = std::max(worst, std::abs(a(p)) / d);
  }
  return worst;
}

inline std::vector<SplitResult> split_all(const WPoly& T, const DominanceOracle& oracle, BoundKind bound,
                                          std::vector<WPoly>* g_out) {
  const DefiningFunction& df = oracle.df();
  const WPoly rho = (WPoly::constant(df.dim(), 1) + T) * df.r();
  std::vector<SplitResult> out;
  if (g_out) g_out->clear();
  for (int j = 0; j < df.nz(); ++j) {
    WPoly g = rho.deriv(Var::z(j), Var::wbar());
    out.push_back(split_S_E(g, oracle, bound, j));
    if (g_out) g_out->push_back(std::move(g));
  }
  return out;
}

inline bool all_zero(const std::vector<SplitResult>& s) {
  return std::all_of(s.begin(), s.end(), [](const SplitResult& x) { return x.S.is_zero(); });
}

// Union of monomials across per-j increments; differing coefficients on the
// same monomial are reported as a conflict and the first one is kept.
inline WPoly merge_increments(const std::vector<WPoly>& incs, int n, std::vector<ConsistencyIssue>& conflicts) {
  std::map<Exponents, std::pair<GaussianRational, int>, GradedOrder> seen;
  for (int j = 0; j < static_cast<int>(incs.size()); ++j)
    for (const auto& [e, c] : incs[j].terms()) {
      auto [it, fresh] = seen.try_emplace(e, c, j);
      if (!fresh && it->second.first != c) {
        SparsePoly<GaussianRational> m(WPoly::nslots(n));
        m.add_term(e, c);
        conflicts.push_back({it->second.second, j, {WPoly(n, m)}, "same monomial with different coefficients"});
      }
    }
  SparsePoly<GaussianRational> out(WPoly::nslots(n));
  for (const auto& [e, v] : seen) out.add_term(e, v.first);
  return WPoly(n, out);
}

}  // namespace detail

// The iterative construction: test the current candidate with k_search,
// otherwise split (rho_n)_{z_j wbar} = S + E, solve T_z = 2iS, add and
// truncate. Handles C^n by solving each j and merging.
inline ConstructionReport construct(const DefiningFunction& df, const ConstructionConfig& cfg) {
  const int n = df.dim();
  ConstructionReport rep;
  rep.config = cfg;
  rep.dim = n;
  rep.r = df.r();
  rep.initial_bound = rep.final_bound = cfg.bound;
  rep.final.T = WPoly(n);
  rep.final.residual = WPoly(n);

  if (cfg.pseudoconvex != PseudoconvexPolicy::Skip) {
    const auto scan = levi_scan(df, sample_boundary(df, cfg.k.radius, cfg.k.samples, cfg.k.seed));
    if (scan.witness) {
      const std::string msg =
          "not pseudoconvex on the verification shell: Levi value " + detail::fmt(scan.min_value);
      if (cfg.pseudoconvex == PseudoconvexPolicy::Error)
        throw NotPseudoconvexError(msg, scan.min_point, scan.min_value);
      rep.warning = msg;
      rep.levi_witness = scan.min_point;
    }
  }

  const DominanceOracle oracle(df, cfg.probes);
  rep.shortcut_applicable = strong_psc_shortcut(df).has_value();

  BoundKind bound = cfg.bound;
  WPoly T(n);
  std::vector<WPoly> solved_S;  // S solved at each executed stage, combined over j
  std::optional<int> cap = cfg.degree_cap;

  for (int stage = 0;; ++stage) {
    StageRecord rec;
    rec.index = stage;
    rec.bound = bound;
    AbsorbResult cand = cfg.absorb ? absorb_r_multiples(T, df) : AbsorbResult{T, {}};
    rec.candidate_T = cand.T;
    rec.absorbed = cand.absorbed;
    rec.k = k_search(oracle, cand.T, cfg.k);

    if (rec.k.found) {
      rep.final.T = cand.T;
      rep.final.K = rec.k.K;
      rep.final.stage = stage;
      rep.final.absorbed = cand.absorbed;
      rep.stages.push_back(std::move(rec));
      const BoundaryShell shell = sample_boundary(df, rep.stages.back().k.radius, cfg.k.samples, cfg.k.seed);
      rep.identity = hessian_identity_check(df, *rep.final.K, rep.final.T, shell);
      if (!rep.identity->passed()) {
        rep.status = ConstructionStatus::Exhausted;
        rep.message = "PSD passed but the Hessian identity check failed (deviation " +
                      detail::fmt(rep.identity->max_deviation) + ")";
      } else {
        rep.status = ConstructionStatus::Certified;
        rep.message = "rho = (1 + K r + T) r passes the PSD check at K = " + rep.final.K->get_str();
      }
      break;
    }
    if (stage >= cfg.max_stages) {
      rep.status = ConstructionStatus::Exhausted;
      rep.message = "no certificate within " + std::to_string(cfg.max_stages) + " stages: " + rec.k.failure;
      rep.stages.push_back(std::move(rec));
      break;
    }

    rec.split = detail::split_all(T, oracle, bound, &rec.g);
    if (detail::all_zero(rec.split) && bound == BoundKind::LeviPlusGradSq && cfg.escalate) {
      bound = BoundKind::LeviOnly;
      rec.escalated = true;
      rec.bound = bound;
      rec.split = detail::split_all(T, oracle, bound, &rec.g);
    }
    rep.final_bound = bound;
    if (detail::all_zero(rec.split)) {
      rep.status = ConstructionStatus::Exhausted;
      rep.message = "every term of r_{z wbar} is an error term under the " + to_string(bound) +
                    " bound, yet no K certifies: " + rec.k.failure;
      rep.stages.push_back(std::move(rec));
      break;
    }

    bool obstructed = false;
    for (int j = 0; j < df.nz(); ++j) {
      auto sol = solve_stage(rec.split[j].S, j);
      std::optional<DominanceVerdict> rv;
      if (!sol.residual.is_zero()) {
        rv = oracle.check(Numerator::abs_square(sol.residual), bound, j);
        if (rv->status == DominanceStatus::NotDominated) {
          obstructed = true;
          rep.message = "stage " + std::to_string(stage + 1) + ": residual of T_z = 2iS (j = " + std::to_string(j + 1) +
                        ") is not an error term; no certificate found (witness along " + rv->witness->curve.label + ")";
        }
      }
      rec.T_inc.push_back(sol.T_inc);
      rec.residual.push_back(sol.residual);
      rec.residual_verdicts.push_back(std::move(rv));
    }

    // Mixed-partial compatibility between the per-j increments.
    for (int j = 0; j < df.nz() && !obstructed; ++j)
      for (int k = j + 1; k < df.nz() && !obstructed; ++k) {
        const WPoly D = rec.T_inc[j].deriv(Var::z(k)) - rec.T_inc[k].deriv(Var::z(j));
        if (D.is_zero()) continue;
        for (int idx : {j, k}) {
          auto v = oracle.check(Numerator::abs_square(D), BoundKind::LeviPlusGradSq, idx);
          if (v.status == DominanceStatus::NotDominated) {
            obstructed = true;
            rep.conflicts.push_back({j, k, {D}, "mixed partials of the increments are not error terms"});
            rep.message = "inconsistent system between j = " + std::to_string(j + 1) + " and k = " + std::to_string(k + 1);
          }
        }
      }

    rec.merged_T_inc = detail::merge_increments(rec.T_inc, n, rep.conflicts);
    rec.solved = true;
    WPoly S_all(n);
    for (const auto& s : rec.split) S_all += s.S;
    solved_S.push_back(S_all);
    T = T + rec.merged_T_inc;
    if (!cap) cap = 2 + std::max(df.r().degree(), T.degree());
    T = T.truncated(*cap);
    rec.T_after = T;
    rep.degree_cap = *cap;
    rep.final.T = T;
    rep.final.stage = stage + 1;
    rep.final.residual = WPoly(n);
    for (const auto& r : rec.residual) rep.final.residual += r;
    rep.stages.push_back(std::move(rec));
    if (obstructed) {
      rep.status = ConstructionStatus::Obstructed;
      break;
    }
  }
  if (!cap) cap = 2 + df.r().degree();
  rep.degree_cap = *cap;

  if (rep.status == ConstructionStatus::Certified && !solved_S.empty()) {
    // |S_{n+1}| / |S_n| at the innermost probe shell, with S_{n+1} taken
    // from the next split of the unabsorbed working T.
    std::vector<Point> inner;
    const std::size_t last = oracle.family().shells().size() - 1;
    for (std::size_t p = 0; p < oracle.family().probes().size(); ++p)
      if (const auto& pt = oracle.family().point(p, last)) inner.push_back(*pt);
    std::vector<WPoly> seq = solved_S;
    WPoly next(n);
    for (const auto& s : detail::split_all(T, oracle, rep.final_bound, nullptr)) next += s.S;
    seq.push_back(next);
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) rep.contraction.push_back(detail::max_abs_ratio(seq[k + 1], seq[k], inner));
  }
  return rep;
}

inline ConstructionReport run_construction(const DefiningFunction& df, const ConstructionConfig& cfg = {}) {
  return construct(df, cfg);
}

// C^n: the same multiplier must serve every j; increments are solved per j,
// checked for mixed-partial compatibility and merged. n = 2 delegates.
inline ConstructionReport cn_simultaneous(const DefiningFunction& df, const ConstructionConfig& cfg = {}) {
  return construct(df, cfg);
}

}  // namespace pshdf
