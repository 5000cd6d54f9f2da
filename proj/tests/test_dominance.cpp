#include <gtest/gtest.h>

#include <map>

#include "pshdf/dominance.hpp"
#include "pshdf/expr.hpp"

using namespace pshdf;

namespace {

std::string r_a_source(int a) {
  return "Im(w) + abs2(z)^2 + 100*abs2(z)^3 + 4*Re(z)*Re(w) - " + std::to_string(a) + "*Re(w)^2";
}

DefiningFunction df_of(const std::string& s) { return make_defining_function(parse_wpoly(s)); }

const DominanceOracle& oracle_a(int a) {
  static std::map<int, DominanceOracle> cache;
  auto it = cache.find(a);
  if (it == cache.end()) it = cache.emplace(a, DominanceOracle(df_of(r_a_source(a)))).first;
  return it->second;
}

// Unit direction of the degenerate line Im z = 0, Re z = 4 Re w in (x, y, u).
double distance_to_degenerate_line(const std::vector<double>& c) {
  const double s = std::sqrt(17.0);
  const double d1 = std::hypot(c[0] - 4 / s, c[1], c[2] - 1 / s);
  const double d2 = std::hypot(c[0] + 4 / s, c[1], c[2] + 1 / s);
  return std::min(d1, d2);
}

}  // namespace

TEST(Dominance, ZeroNumerator) {
  auto df = df_of("Im(w) + abs2(z)");
  auto g = df.r().deriv(Var::z(), Var::wbar());
  ASSERT_TRUE(g.is_zero());
  auto v = dominance_check(g, BoundKind::LeviPlusGradSq, df);
  EXPECT_EQ(v.status, DominanceStatus::Dominated);
  EXPECT_EQ(v.constant, 0.0);
}

TEST(Dominance, R10GradientAgainstLevi) {
  const auto& o = oracle_a(10);
  auto v = dominance_check(o.df().r().deriv(Var::z()), BoundKind::LeviOnly, o);
  EXPECT_EQ(v.status, DominanceStatus::Dominated) << v.note;
  EXPECT_TRUE(std::isfinite(v.constant));
  EXPECT_FALSE(v.certificate.empty());
}

TEST(Dominance, R8GradientAgainstLeviEscapes) {
  const auto& o = oracle_a(8);
  const WPoly rz = o.df().r().deriv(Var::z());
  auto v = dominance_check(rz, BoundKind::LeviOnly, o);
  ASSERT_EQ(v.status, DominanceStatus::NotDominated);
  ASSERT_TRUE(v.witness);
  const auto& w = *v.witness;
  EXPECT_TRUE(w.curve.is_ray);
  EXPECT_LE(distance_to_degenerate_line(w.curve.coeffs), 1e-3) << w.curve.label;
  EXPECT_GE(w.run_end - w.run_begin, 4u);
  for (std::size_t k = w.run_begin + 1; k < w.run_end; ++k) EXPECT_GT(w.table[k].ratio, w.table[k - 1].ratio);
  EXPECT_TRUE(o.replay(w, Numerator::abs_square(rz), BoundKind::LeviOnly));
}

TEST(Dominance, LeviGate) {
  auto spc = DominanceOracle(df_of("Im(w) + abs2(z)"));
  EXPECT_EQ(levi_dominance_gate(spc).status, DominanceStatus::Dominated);
  EXPECT_EQ(levi_dominance_gate(oracle_a(10)).status, DominanceStatus::Dominated);
  EXPECT_EQ(levi_dominance_gate(oracle_a(8)).status, DominanceStatus::NotDominated);
}

TEST(Dominance, SplitExamples) {
  const auto& o10 = oracle_a(10);
  auto s = split_S_E(o10.df().r().deriv(Var::z(), Var::wbar()), o10, BoundKind::LeviPlusGradSq);
  EXPECT_EQ(s.S, WPoly::constant(2, 1));
  EXPECT_TRUE(s.E.is_zero());
  auto z = split_S_E(WPoly(2), o10, BoundKind::LeviPlusGradSq);
  EXPECT_TRUE(z.S.is_zero());
  EXPECT_TRUE(z.E.is_zero());
}

TEST(Dominance, SplitStageTwoOfR8) {
  const auto& o = oracle_a(8);
  const WPoly T = parse_wpoly("-4*Im(z)");
  const WPoly rho = (WPoly::constant(2, 1) + T) * o.df().r();
  const WPoly g = rho.deriv(Var::z(), Var::wbar());
  // -4 Im z + 4i Re z - 16i Re w, as monomials: 4iz - 8iw - 8iwbar.
  EXPECT_EQ(g, parse_wpoly("-4*Im(z) + 4*i*Re(z) - 16*i*Re(w)"));
  auto levi = split_S_E(g, o, BoundKind::LeviOnly);
  EXPECT_EQ(levi.S, g);
  EXPECT_EQ(levi.S + levi.E, g);
  auto wide = split_S_E(g, o, BoundKind::LeviPlusGradSq);
  EXPECT_TRUE(wide.S.is_zero());
  EXPECT_EQ(wide.S + wide.E, g);
}

TEST(Dominance, StoredConstantBoundsFreshProbes) {
  for (int a : {8, 10}) {
    const auto& o = oracle_a(a);
    ProbeConfig fresh;
    fresh.seed = 987654321;
    DominanceOracle o2(o.df(), fresh);
    const WPoly P = parse_wpoly("z*Re(w) + abs2(z)");
    auto v = dominance_check(P, BoundKind::LeviPlusGradSq, o);
    ASSERT_EQ(v.status, DominanceStatus::Dominated);
    auto ev = o2.evaluator(Numerator::abs_square(P), BoundKind::LeviPlusGradSq);
    const auto& shells = o2.family().shells();
    for (std::size_t p = 0; p < o2.family().probes().size(); ++p)
      for (std::size_t s = shells.size() / 2; s < shells.size(); ++s) {
        const auto& pt = o2.family().point(p, s);
        if (!pt) continue;
        const double r = ev.row(*pt, shells[s]).ratio;
        if (!std::isnan(r)) EXPECT_LE(r, v.constant);
      }
  }
}

TEST(Dominance, MonotoneUnderWidening) {
  for (int a : {8, 10}) {
    const auto& o = oracle_a(a);
    for (const char* src : {"z", "w", "Re(w)^2", "z*abs2(z)", "2*Re(z)", "Im(w) + z^2"}) {
      const WPoly P = parse_wpoly(src);
      auto narrow = dominance_check(P, BoundKind::LeviOnly, o);
      auto wide = dominance_check(P, BoundKind::LeviPlusGradSq, o);
      if (narrow.dominated()) EXPECT_TRUE(wide.dominated()) << src;
    }
  }
}

TEST(Dominance, ThresholdCheck) {
  EXPECT_EQ(threshold_check(oracle_a(8), parse_wpoly("-4*Im(z)")).status, DominanceStatus::NotDominated);
  EXPECT_NE(threshold_check(oracle_a(10), parse_wpoly("-4*Im(z)")).status, DominanceStatus::NotDominated);
  EXPECT_EQ(threshold_check(oracle_a(10), WPoly(2)).status, DominanceStatus::NotDominated);
  EXPECT_NE(threshold_check(oracle_a(8), parse_wpoly("-4*Im(z) + 8*Im(z)^2 - 8*Re(z)^2")).status,
            DominanceStatus::NotDominated);
}

TEST(Dominance, DegenerateProbeFamily) {
  ProbeConfig cfg;
  cfg.shells = {1e6, 2e6, 4e6, 8e6};
  cfg.phases = 0;
  EXPECT_THROW(DominanceOracle(df_of("Im(w) + Re(w)^2 + abs2(z)"), cfg), ConfigError);
}
