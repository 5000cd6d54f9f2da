#include <gtest/gtest.h>

#include <map>
#include <random>

#include "pshdf/expr.hpp"
#include "pshdf/multiplier.hpp"

using namespace pshdf;

namespace {

std::string r_a_source(int a) {
  return "Im(w) + abs2(z)^2 + 100*abs2(z)^3 + 4*Re(z)*Re(w) - " + std::to_string(a) + "*Re(w)^2";
}

DefiningFunction df_of(const std::string& s) { return make_defining_function(parse_wpoly(s)); }

const ConstructionReport& report_for(const std::string& src) {
  static std::map<std::string, ConstructionReport> cache;
  auto it = cache.find(src);
  if (it == cache.end()) it = cache.emplace(src, run_construction(df_of(src))).first;
  return it->second;
}

const char* const kCertifiedFixtures[] = {"Im(w) + abs2(z)", "Im(w) + abs2(z)^2 + 100*abs2(z)^3 + 4*Re(z)*Re(w) - 10*Re(w)^2",
                                          "Im(w) + abs2(z)^2 + 100*abs2(z)^3 + 4*Re(z)*Re(w) - 8*Re(w)^2"};

std::vector<Point> innermost_probe_points(const DominanceOracle& o) {
  std::vector<Point> out;
  const std::size_t last = o.family().shells().size() - 1;
  for (std::size_t p = 0; p < o.family().probes().size(); ++p)
    if (const auto& pt = o.family().point(p, last)) out.push_back(*pt);
  return out;
}

}  // namespace

TEST(SolveStage, Examples) {
  auto one = solve_stage(WPoly::constant(2, 1));
  EXPECT_EQ(one.T_inc, parse_wpoly("-4*Im(z)"));
  EXPECT_TRUE(one.residual.is_zero());

  auto two = solve_stage(parse_wpoly("-4*Im(z) + 4*i*Re(z) - 16*i*Re(w)"));
  EXPECT_EQ(two.T_inc, parse_wpoly("8*Im(z)^2 - 8*Re(z)^2 + 64*Re(z)*Re(w)"));
  EXPECT_TRUE(two.residual.is_zero());

  auto zero = solve_stage(WPoly(2));
  EXPECT_TRUE(zero.T_inc.is_zero());
  EXPECT_TRUE(zero.residual.is_zero());
}

TEST(SolveStage, ExactnessOnRandomInputs) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-5, 5), slot(0, 3), deg(0, 4);
  for (int k = 0; k < 40; ++k) {
    WPoly S(2);
    for (int t = 0; t < 3; ++t) {
      Exponents e(4, 0);
      for (int b = deg(rng); b > 0; --b) ++e[slot(rng)];
      SparsePoly<GaussianRational> m(4);
      m.add_term(e, GaussianRational(make_rational(coef(rng), 3), make_rational(coef(rng), 7)));
      S += WPoly(2, m);
    }
    auto sol = solve_stage(S);
    EXPECT_TRUE(sol.T_inc.is_real());
    EXPECT_TRUE((sol.T_inc.deriv(Var::z()) - S.scaled(GaussianRational(0, 2)) - sol.residual).is_zero());
  }
}

TEST(Absorb, Examples) {
  auto df8 = df_of(r_a_source(8));
  auto a = absorb_r_multiples(parse_wpoly("8*Im(z)^2 - 8*Re(z)^2 + 64*Re(z)*Re(w)"), df8);
  EXPECT_EQ(a.T, parse_wpoly("8*Im(z)^2 - 8*Re(z)^2"));
  ASSERT_EQ(a.absorbed.size(), 1u);
  EXPECT_EQ(a.absorbed[0], parse_wpoly("64*Re(z)*Re(w)"));

  auto b = absorb_r_multiples(parse_wpoly("-4*Im(z)"), df8);
  EXPECT_EQ(b.T, parse_wpoly("-4*Im(z)"));
  EXPECT_TRUE(b.absorbed.empty());

  auto c = absorb_r_multiples(WPoly(2), df8);
  EXPECT_TRUE(c.T.is_zero());
  EXPECT_TRUE(c.absorbed.empty());
}

TEST(Absorb, PartialGroupIsKept) {
  // Same bidegree as |z|^4 but not proportional to it.
  auto df = df_of(r_a_source(10));
  auto a = absorb_r_multiples(parse_wpoly("Re(z)^4"), df);
  EXPECT_EQ(a.T, parse_wpoly("Re(z)^4"));
}

TEST(Shortcut, Examples) {
  auto spc = strong_psc_shortcut(df_of("Im(w) + abs2(z)"));
  ASSERT_TRUE(spc);
  EXPECT_TRUE(spc->T.is_zero());
  EXPECT_EQ(levi_form(df_of("Im(w) + abs2(z)")).constant_term(), GaussianRational(make_rational(1, 4)));
  for (int a : {7, 8, 10}) EXPECT_FALSE(strong_psc_shortcut(df_of(r_a_source(a))));
  EXPECT_FALSE(strong_psc_shortcut(make_defining_function(WPoly::im_w(2))));
}

TEST(KSearch, StronglyPseudoconvexWideShell) {
  DominanceOracle o(df_of("Im(w) + abs2(z)"));
  KSearchConfig cfg;
  cfg.radius = 0.25;
  cfg.samples = 1000;
  auto k = k_search(o, WPoly(2), cfg);
  ASSERT_TRUE(k.found) << k.failure;
  EXPECT_LE(k.exponent, 4);
  // Independent brute force at the accepted K.
  auto shell = sample_boundary(o.df(), 0.25, 1000, cfg.seed);
  const WPoly rho = (WPoly::constant(2, 1) + o.df().r().scaled(GaussianRational(k.K))) * o.df().r();
  EXPECT_TRUE(psd_check(rho, shell).passed);
}

TEST(KSearch, R8FirstStageCandidateFails) {
  DominanceOracle o(df_of(r_a_source(8)));
  auto k = k_search(o, parse_wpoly("-4*Im(z)"), KSearchConfig{});
  EXPECT_FALSE(k.found);
  EXPECT_FALSE(k.failure.empty());
  EXPECT_EQ(k.gate.status, DominanceStatus::NotDominated);
  ASSERT_TRUE(k.gate.witness);
  EXPECT_FALSE(k.psd.passed);
  EXPECT_EQ(k.psd.worst_hessian.size(), 4u);
  EXPECT_EQ(k.shell_shrinks, 1);
}

TEST(KSearch, LeviFlat) {
  DominanceOracle o(make_defining_function(WPoly::im_w(2)));
  auto k = k_search(o, WPoly(2), KSearchConfig{});
  ASSERT_TRUE(k.found) << k.failure;
  EXPECT_EQ(k.K, Rational(1));
}

TEST(KSearch, RejectsComplexT) {
  DominanceOracle o(df_of("Im(w) + abs2(z)"));
  EXPECT_THROW(k_search(o, WPoly::z(2), KSearchConfig{}), std::invalid_argument);
}

TEST(Construction, StronglyPseudoconvex) {
  const auto& rep = report_for(kCertifiedFixtures[0]);
  ASSERT_EQ(rep.status, ConstructionStatus::Certified) << rep.message;
  EXPECT_TRUE(rep.shortcut_applicable);
  EXPECT_EQ(rep.stages.size(), 1u);
  EXPECT_TRUE(rep.final.T.is_zero());
  ASSERT_TRUE(rep.final.K);
}

TEST(Construction, R10OneStage) {
  const auto& rep = report_for(kCertifiedFixtures[1]);
  ASSERT_EQ(rep.status, ConstructionStatus::Certified) << rep.message;
  EXPECT_EQ(rep.final.stage, 1);
  EXPECT_EQ(rep.final.T, parse_wpoly("-4*Im(z)"));
  ASSERT_TRUE(rep.final.K);
  EXPECT_LE(*rep.final.K, Rational(1 << 20));
  EXPECT_FALSE(rep.stages[0].k.found);
  EXPECT_EQ(rep.stages[0].split[0].S, WPoly::constant(2, 1));
  ASSERT_TRUE(rep.identity);
  EXPECT_TRUE(rep.identity->passed());
  EXPECT_EQ(rep.final_bound, BoundKind::LeviPlusGradSq);
}

TEST(Construction, R8TwoStages) {
  const auto& rep = report_for(kCertifiedFixtures[2]);
  ASSERT_EQ(rep.status, ConstructionStatus::Certified) << rep.message;
  EXPECT_EQ(rep.final.stage, 2);
  EXPECT_EQ(rep.final.T, parse_wpoly("-4*Im(z) - 8*Re(z)^2 + 8*Im(z)^2"));
  ASSERT_EQ(rep.final.absorbed.size(), 1u);
  EXPECT_EQ(rep.final.absorbed[0], parse_wpoly("64*Re(z)*Re(w)"));

  const auto& s1 = rep.stages[1];
  EXPECT_EQ(s1.candidate_T, parse_wpoly("-4*Im(z)"));
  EXPECT_FALSE(s1.k.found);
  EXPECT_TRUE(s1.k.gate.witness);
  EXPECT_TRUE(s1.escalated);
  EXPECT_EQ(s1.split[0].S, parse_wpoly("4*i*z - 8*i*w - 8*i*wbar"));
  EXPECT_EQ(rep.final_bound, BoundKind::LeviOnly);
  ASSERT_TRUE(rep.identity);
  EXPECT_TRUE(rep.identity->passed());
}

TEST(Construction, CertifiedReportsReplay) {
  for (const char* src : kCertifiedFixtures) {
    const auto& rep = report_for(src);
    ASSERT_EQ(rep.status, ConstructionStatus::Certified);
    const auto& k = rep.stages.back().k;
    auto df = df_of(src);
    auto shell = sample_boundary(df, k.radius, k.samples, k.seed);
    const WPoly rho = rep.final.h(df) * df.r();
    EXPECT_TRUE(psd_check(rho, shell, rep.config.k.tol).passed) << src;
    EXPECT_TRUE(hessian_identity_check(df, *rep.final.K, rep.final.T, shell).passed()) << src;
  }
}

TEST(Construction, Contraction) {
  for (const char* src : kCertifiedFixtures) {
    const auto& rep = report_for(src);
    const auto solved = std::count_if(rep.stages.begin(), rep.stages.end(), [](const auto& s) { return s.solved; });
    ASSERT_EQ(rep.contraction.size(), static_cast<std::size_t>(solved)) << src;
    for (double c : rep.contraction) EXPECT_LT(c, 1.0) << src;
  }
}

TEST(Construction, StageCancelsItsSignificantPart) {
  for (const char* src : kCertifiedFixtures) {
    const auto& rep = report_for(src);
    auto df = df_of(src);
    DominanceOracle o(df);
    const auto pts = innermost_probe_points(o);
    for (const auto& st : rep.stages) {
      if (!st.solved || !st.residual[0].is_zero()) continue;
      const WPoly g = ((WPoly::constant(2, 1) + st.T_after) * df.r()).deriv(Var::z(), Var::wbar());
      const CompiledPoly<> G(g), S(st.split[0].S);
      for (const auto& p : pts) {
        const double s = std::abs(S(p));
        if (s < 1e-300) continue;
        EXPECT_LE(std::abs(G(p)), 0.5 * s) << src << " stage " << st.index;
      }
    }
  }
}

TEST(Construction, StageBudgetExhausted) {
  ConstructionConfig cfg;
  cfg.max_stages = 0;
  auto rep = run_construction(df_of(r_a_source(10)), cfg);
  EXPECT_EQ(rep.status, ConstructionStatus::Exhausted);
  EXPECT_EQ(rep.stages.size(), 1u);
}

TEST(Construction, NotPseudoconvexIsAnError) {
  try {
    run_construction(df_of(r_a_source(7)));
    FAIL() << "expected NotPseudoconvexError";
  } catch (const NotPseudoconvexError& e) {
    EXPECT_LT(e.value(), 0.0);
    EXPECT_LT(eval(levi_form(df_of(r_a_source(7))), e.witness()).real(), 0.0);
  }
}

TEST(Construction, ObstructedResidual) {
  // S = zbar^2 / 2 gives Q = i z zbar^2, whose conjugate half leaves the
  // residual -2i z zbar, and that escapes the bound.
  ConstructionConfig cfg;
  cfg.pseudoconvex = PseudoconvexPolicy::Skip;
  auto rep = run_construction(df_of("Im(w) + abs2(z)^3 + Re(z^2*conj(z)*w)"), cfg);
  EXPECT_EQ(rep.status, ConstructionStatus::Obstructed);
  ASSERT_FALSE(rep.stages.empty());
  const auto& st = rep.stages.back();
  EXPECT_FALSE(st.residual[0].is_zero());
  ASSERT_TRUE(st.residual_verdicts[0]);
  EXPECT_EQ(st.residual_verdicts[0]->status, DominanceStatus::NotDominated);
  EXPECT_TRUE(st.residual_verdicts[0]->witness);
}

TEST(Construction, NoAbsorbKeepsRTerms) {
  ConstructionConfig cfg;
  cfg.absorb = false;
  auto rep = run_construction(df_of(r_a_source(8)), cfg);
  ASSERT_GE(rep.stages.size(), 3u);
  EXPECT_EQ(rep.stages[2].candidate_T, parse_wpoly("-4*Im(z) - 8*Re(z)^2 + 8*Im(z)^2 + 64*Re(z)*Re(w)"));
}

TEST(Simultaneous, StronglyPseudoconvexC3) {
  auto rep = cn_simultaneous(df_of("Im(w) + abs2(z1) + abs2(z2)"));
  ASSERT_EQ(rep.status, ConstructionStatus::Certified) << rep.message;
  EXPECT_TRUE(rep.final.T.is_zero());
  EXPECT_EQ(rep.dim, 3);
}

TEST(Simultaneous, PerIndexFlow) {
  // The tangential Levi matrix of this input is indefinite (mixed entry ~ z2),
  // so only the symbolic per-index flow is checked here.
  ConstructionConfig cfg;
  cfg.pseudoconvex = PseudoconvexPolicy::Warn;
  cfg.max_stages = 1;
  auto rep = cn_simultaneous(df_of("Im(w) + abs2(z1)^2 + abs2(z2) + 4*Re(z1)*Re(w) - 10*Re(w)^2"), cfg);
  EXPECT_TRUE(rep.warning);
  ASSERT_GE(rep.stages.size(), 1u);
  const auto& s0 = rep.stages[0];
  ASSERT_EQ(s0.split.size(), 2u);
  EXPECT_EQ(s0.split[0].S, WPoly::constant(3, 1));
  EXPECT_TRUE(s0.split[1].S.is_zero());
  EXPECT_EQ(s0.merged_T_inc, parse_wpoly("-4*Im(z1)", 3));
  EXPECT_TRUE(rep.conflicts.empty());
  EXPECT_NE(rep.status, ConstructionStatus::Certified);
}

TEST(Simultaneous, DelegatesInTwoVariables) {
  const auto& a = report_for(kCertifiedFixtures[1]);
  auto b = cn_simultaneous(df_of(kCertifiedFixtures[1]));
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.final.T, b.final.T);
  EXPECT_EQ(*a.final.K, *b.final.K);
}
