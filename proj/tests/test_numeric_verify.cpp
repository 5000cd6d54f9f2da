#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pshdf/expr.hpp"
#include "pshdf/numeric_verify.hpp"

using namespace pshdf;

namespace {

std::string r_a_source(int a) {
  return "Im(w) + abs2(z)^2 + 100*abs2(z)^3 + 4*Re(z)*Re(w) - " + std::to_string(a) + "*Re(w)^2";
}

DefiningFunction df_of(const std::string& s) { return make_defining_function(parse_wpoly(s)); }

WPoly multiplier(const DefiningFunction& df, long K, const std::string& T) {
  return WPoly::constant(df.dim(), 1) + parse_wpoly(T, df.dim()) + df.r().scaled(GaussianRational(Rational(K)));
}

// Boundary points on Im z = 0, Re z = 4 Re w, where the Levi form of r_8 degenerates.
std::vector<Point> degenerate_line(const DefiningFunction& df, double radius) {
  BoundaryProjector proj(df);
  std::vector<Point> out;
  for (int k = 0; k < 200; ++k) {
    const double t = radius / std::sqrt(17.0) * std::pow(0.95, k);
    std::vector<std::complex<double>> z{{4 * t, 0.0}};
    if (auto p = proj.project(z, t)) out.push_back(*p);
  }
  return out;
}

}  // namespace

TEST(Psd, SumOfSquares) {
  auto df = df_of("Im(w) + abs2(z)");
  auto r = psd_check(parse_wpoly("abs2(z) + abs2(w)"), sample_boundary(df, 0.25, 200, 1));
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.minima.least_eigenvalue, 1.0, 1e-14);
  EXPECT_EQ(r.points_checked, 200u);
}

TEST(Psd, R8FirstStageFailsForEveryK) {
  auto df = df_of(r_a_source(8));
  auto pts = sample_boundary(df, 1e-2, 2000, 1).points;
  for (auto& p : degenerate_line(df, 1e-2)) pts.push_back(p);
  for (int e = 0; e <= 20; ++e) {
    auto res = psd_check(multiplier(df, 1L << e, "-4*Im(z)") * df.r(), pts);
    EXPECT_FALSE(res.passed) << "K = 2^" << e;
    EXPECT_LT(res.minima.worst(), -res.tolerance);
  }
}

TEST(Psd, R8SecondStagePasses) {
  auto df = df_of(r_a_source(8));
  auto shell = sample_boundary(df, 1e-2, 2000, 1);
  bool some = false;
  for (int e = 0; e <= 20 && !some; ++e)
    some = psd_check(multiplier(df, 1L << e, "-4*Im(z) - 8*Re(z)^2 + 8*Im(z)^2") * df.r(), shell).passed;
  EXPECT_TRUE(some);
}

TEST(Psd, Deterministic) {
  auto df = df_of(r_a_source(10));
  const WPoly f = multiplier(df, 8, "-4*Im(z)") * df.r();
  auto a = psd_check(f, sample_boundary(df, 1e-2, 300, 42));
  auto b = psd_check(f, sample_boundary(df, 1e-2, 300, 42));
  EXPECT_EQ(a.worst_point, b.worst_point);
  EXPECT_EQ(a.minima.least_eigenvalue, b.minima.least_eigenvalue);
  EXPECT_EQ(a.minima.minor, b.minima.minor);
}

TEST(Identity, StronglyPseudoconvexAtOrigin) {
  // det H(r + 5r^2) at 0 with r = Im w + |z|^2: r_{zzbar} = 1, (5r^2)_{wwbar} = 10 |r_w|^2 = 5/2.
  auto df = df_of("Im(w) + abs2(z)");
  const Point origin{{0, 0}, {0, 0}};
  const WPoly rho = multiplier(df, 5, "0") * df.r();
  EXPECT_NEAR(eval(hessian_minor_det(rho), origin).real(), 2.5, 1e-15);
  auto id = hessian_identity_check(df, Rational(5), WPoly(2), {origin});
  EXPECT_LE(id.max_deviation, 1e-15);
  EXPECT_NEAR(id.max_lhs, 2.5, 1e-15);
}

TEST(Identity, KZeroIsExact) {
  auto df = df_of(r_a_source(8));
  auto id = hessian_identity_check(df, Rational(0), parse_wpoly("-4*Im(z)"), sample_boundary(df, 1e-2, 100, 3));
  EXPECT_EQ(id.max_deviation, 0.0);
}

TEST(Identity, R10Shell) {
  auto df = df_of(r_a_source(10));
  auto id = hessian_identity_check(df, Rational(3), parse_wpoly("-4*Im(z)"), sample_boundary(df, 1e-2, 100, 7));
  EXPECT_EQ(id.points, 100u);
  EXPECT_LE(id.max_deviation, 1e-8);
  EXPECT_TRUE(id.passed());
}

TEST(Identity, DeviationLinearInResidual) {
  // Off the boundary the identity picks up terms proportional to r itself.
  auto df = df_of(r_a_source(10));
  const WPoly T = parse_wpoly("-4*Im(z)");
  double prev = 0.0;
  for (double level : {1e-6, 5e-7, 2.5e-7}) {
    auto shell = sample_boundary(df, 1e-2, 200, 11, level);
    const double dev = hessian_identity_check(df, Rational(3), T, shell).max_deviation;
    if (prev > 0.0) {
      EXPECT_GT(prev / dev, 1.0);
      EXPECT_LT(prev / dev, 4.0);
    }
    prev = dev;
  }
}

TEST(Identity, RandomDefiningFunctions) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> coef(-3, 3), slot(0, 3), nt(1, 4), kd(1, 8);
  for (int trial = 0; trial < 10; ++trial) {
    auto random_real = [&](int lo, int hi) {
      WPoly f(2);
      for (int t = nt(rng); t > 0; --t) {
        Exponents e(4, 0);
        const int d = std::uniform_int_distribution<int>(lo, hi)(rng);
        for (int b = 0; b < d; ++b) ++e[slot(rng)];
        SparsePoly<GaussianRational> m(4);
        m.add_term(e, GaussianRational(make_rational(coef(rng), 4), make_rational(coef(rng), 5)));
        f += WPoly(2, m);
      }
      return f.realify();
    };
    auto df = make_defining_function(WPoly::im_w(2) + random_real(2, 6));
    const WPoly T = random_real(1, 3);
    auto id = hessian_identity_check(df, Rational(kd(rng)), T, sample_boundary(df, 1e-2, 200, trial));
    EXPECT_TRUE(id.passed()) << id.max_deviation << " vs " << id.allowed();
  }
}

TEST(Necessary, HOneFailsForRA) {
  for (int a : {8, 10}) {
    auto df = df_of(r_a_source(a));
    DominanceOracle o(df);
    auto rep = necessary_conditions_check(df, WPoly::constant(2, 1), sample_boundary(df, 1e-2, 2000, 1).points, o);
    ASSERT_EQ(rep.inequalities.size(), 4u);
    EXPECT_FALSE(rep.inequalities[0].holds);
    EXPECT_FALSE(rep.passed());
  }
}

TEST(Necessary, LeviFlatHoldsWithEquality) {
  auto df = make_defining_function(WPoly::im_w(2));
  DominanceOracle o(df);
  auto rep = necessary_conditions_check(df, WPoly::constant(2, 1), sample_boundary(df, 1e-2, 100, 1).points, o);
  for (const auto& i : rep.inequalities) {
    EXPECT_TRUE(i.holds);
    EXPECT_EQ(i.min_slack, 0.0);
  }
  EXPECT_EQ(rep.max_abs_E, 0.0);
  EXPECT_TRUE(rep.passed());
}

TEST(Necessary, CertifiedR10HasPositiveSlack) {
  auto df = df_of(r_a_source(10));
  DominanceOracle o(df);
  auto shell = sample_boundary(df, 1e-2, 2000, 1);
  const WPoly h = multiplier(df, 64, "-4*Im(z)");
  ASSERT_TRUE(psd_check(h * df.r(), shell).passed);
  auto rep = necessary_conditions_check(df, h, shell.points, o);
  for (const auto& i : rep.inequalities) EXPECT_GT(i.min_slack, 0.0) << i.name;
  EXPECT_TRUE(rep.passed());
}

TEST(Necessary, VanishingMultiplierRejected) {
  auto df = df_of("Im(w) + abs2(z)");
  DominanceOracle o(df);
  EXPECT_THROW(necessary_conditions_check(df, WPoly(2), sample_boundary(df, 1e-2, 10, 1).points, o), ConfigError);
}

TEST(LeviScan, PseudoconvexityThreshold) {
  for (int a : {8, 10}) {
    auto df = df_of(r_a_source(a));
    auto scan = levi_scan(df, sample_boundary(df, 1e-2, 10000, 1));
    EXPECT_EQ(scan.negatives, 0u) << "A = " << a;
    EXPECT_FALSE(scan.witness);
  }
  auto df7 = df_of(r_a_source(7));
  auto scan = levi_scan(df7, sample_boundary(df7, 1e-2, 10000, 1));
  ASSERT_TRUE(scan.witness);
  EXPECT_LT(scan.witness_index, 10000u);
  EXPECT_LT(eval(levi_form(df7), *scan.witness).real(), 0.0);
}

TEST(LeviScan, HigherDimensionUsesTangentialMatrix) {
  // Diagonal entries L(v_1), L(v_2) vanish or stay positive, yet the mixed
  // entry makes the tangential Levi matrix indefinite.
  auto df = df_of("Im(w) + abs2(z1)^2 + abs2(z2) + 4*Re(z1)*Re(w) - 10*Re(w)^2");
  auto scan = levi_scan(df, sample_boundary(df, 1e-2, 2000, 1));
  EXPECT_TRUE(scan.witness);
  auto spc = df_of("Im(w) + abs2(z1) + abs2(z2)");
  EXPECT_FALSE(levi_scan(spc, sample_boundary(spc, 1e-2, 500, 1)).witness);
}

TEST(Csv, Table) {
  std::ostringstream os;
  write_csv(os, {Point{{0.5, -1}, {0.25, 0}}}, {"levi"}, {{2.0}});
  EXPECT_EQ(os.str(), "re_z,im_z,re_w,im_w,levi\n0.5,-1,0.25,0,2\n");
}
