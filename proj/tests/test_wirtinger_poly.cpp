#include <gtest/gtest.h>

#include <random>

#include "pshdf/evaluate.hpp"
#include "pshdf/expr.hpp"
#include "pshdf/wpoly.hpp"

using namespace pshdf;

namespace {

const GaussianRational I = GaussianRational::imag_unit();
GaussianRational q(long a, long b = 1) { return GaussianRational(make_rational(a, b)); }

WPoly z() { return WPoly::z(2); }
WPoly zb() { return WPoly::zbar(2); }
WPoly w() { return WPoly::w(2); }
WPoly wb() { return WPoly::wbar(2); }

// Random real polynomial built as realify of a random complex one.
WPoly random_real_poly(std::mt19937_64& rng, int n = 2, int max_deg = 4) {
  std::uniform_int_distribution<int> coef(-5, 5), deg(0, max_deg), nterms(1, 6);
  WPoly p(n);
  const int k = nterms(rng);
  for (int t = 0; t < k; ++t) {
    Exponents e(WPoly::nslots(n), 0);
    int budget = deg(rng);
    std::uniform_int_distribution<std::size_t> slot(0, e.size() - 1);
    while (budget-- > 0) ++e[slot(rng)];
    SparsePoly<GaussianRational> m(WPoly::nslots(n));
    m.add_term(e, GaussianRational(make_rational(coef(rng), 1 + (coef(rng) + 5) % 3), make_rational(coef(rng), 2)));
    p += WPoly(n, m);
  }
  return p.realify();
}

}  // namespace

TEST(Arith, BinomialExpansion) {
  WPoly s = z() + zb();
  EXPECT_EQ(s * s, z() * z() + q(2) * z() * zb() + zb() * zb());
  EXPECT_EQ(s + WPoly(2), s);
}

TEST(Arith, ImWSquared) {
  WPoly im = WPoly::im_w(2);
  WPoly expected = q(-1, 4) * w() * w() + q(1, 2) * w() * wb() + q(-1, 4) * wb() * wb();
  EXPECT_EQ(im * im, expected);
}

TEST(Arith, DimensionMismatchThrows) { EXPECT_THROW(WPoly::z(2) + WPoly::z(3), DimensionError); }

TEST(Conjugate, Examples) {
  EXPECT_EQ((I * z()).conjugate(), (-I) * zb());
  WPoly r = WPoly::im_w(2) + z() * zb();
  EXPECT_EQ(r.conjugate(), r);
  EXPECT_EQ((q(2) * I * z() + w()).conjugate(), q(-2) * I * zb() + wb());
}

TEST(Derivative, Examples) {
  EXPECT_EQ((z() * zb()).deriv(Var::z(), Var::zbar()), WPoly::constant(2, 1));
  EXPECT_EQ((q(4) * WPoly::re_z(2) * WPoly::re_w(2)).deriv(Var::z()), q(2) * WPoly::re_w(2));
  WPoly imz = WPoly::im_z(2);
  EXPECT_EQ((q(8) * imz * imz).deriv(Var::z()), q(-8) * I * imz);
}

TEST(Antiderivative, Examples) {
  EXPECT_EQ(WPoly::constant(2, q(2) * I).antiderivative_z(), q(2) * I * z());
  EXPECT_TRUE(WPoly(2).antiderivative_z().is_zero());
  WPoly p = q(-8) * z() + q(32) * WPoly::re_w(2);
  EXPECT_EQ(p.antiderivative_z(), q(-4) * z() * z() + q(32) * z() * WPoly::re_w(2));
}

TEST(Realify, Examples) {
  EXPECT_EQ((q(2) * I * z()).realify(), q(-4) * WPoly::im_z(2));
  WPoly x = WPoly::re_z(2), y = WPoly::im_z(2), u = WPoly::re_w(2);
  WPoly t2 = (q(-4) * z() * z() + q(32) * z() * u).realify();
  EXPECT_EQ(t2, q(8) * y * y - q(8) * x * x + q(64) * x * u);
  WPoly r = WPoly::im_w(2) + z() * zb();
  EXPECT_EQ(r.realify(), q(2) * r);
}

TEST(Eval, Examples) {
  Point p{{0.0, 0.0}, {0.3, -0.01}};
  EXPECT_NEAR(eval(WPoly::im_w(2), p).real(), -0.01, 1e-15);
  Point p2{{3.0, 4.0}, {0.0, 0.0}};
  EXPECT_NEAR(eval(z() * zb(), p2).real(), 25.0, 1e-12);
  EXPECT_NEAR(eval(z() * zb(), p2).imag(), 0.0, 1e-12);
}

TEST(Eval, ExactMatchesFloating) {
  WPoly p = q(3, 2) * z() * z() * wb() + I * zb() + q(-1, 3);
  std::vector<GaussianRational> pt{GaussianRational(make_rational(1, 2), make_rational(-1, 3)), GaussianRational(make_rational(1, 5), make_rational(2, 7))};
  auto exact = p.evaluate_exact(pt).to_complex();
  Point fp{pt[0].to_complex(), pt[1].to_complex()};
  EXPECT_NEAR(std::abs(exact - eval(p, fp)), 0.0, 1e-14);
}

TEST(Truncate, Examples) {
  EXPECT_EQ((z() + z() * z() * zb()).truncated(2), z());
  WPoly p = z() * z() * wb() + w();
  EXPECT_EQ(p.truncated(p.degree()), p);
}

TEST(Truncate, GeometricSeries) {
  // 1/(1 - 2i t) for t = Re w, expanded then cut at degree 2.
  WPoly t = WPoly::re_w(2);
  WPoly x = q(2) * I * t;
  WPoly series = WPoly::constant(2, 1) + x + x * x + x * x * x;
  EXPECT_EQ(series.truncated(2), WPoly::constant(2, 1) + q(2) * I * t - q(4) * t * t);
}

TEST(Text, CanonicalForm) {
  EXPECT_EQ(WPoly::im_w(2).to_string(), "-(1/2)i * w + (1/2)i * wbar");
  EXPECT_EQ((q(-4) * WPoly::im_z(2)).to_real_string(), "-4*Im(z)");
  WPoly x = WPoly::re_z(2), y = WPoly::im_z(2);
  EXPECT_EQ((q(8) * y * y - q(8) * x * x).to_real_string(), "-8*Re(z)^2 + 8*Im(z)^2");
}

TEST(Properties, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    WPoly p = random_real_poly(rng);
    CompiledPoly<> cp(p), dz(p.deriv(Var::z())), dw(p.deriv(Var::w()));
    for (int s = 0; s < 10; ++s) {
      Point pt{{u(rng), u(rng)}, {u(rng), u(rng)}};
      auto shifted = [&](int slot, std::complex<double> d) {
        Point q2 = pt;
        q2[slot] += d;
        return cp(q2);
      };
      for (int slot = 0; slot < 2; ++slot) {
        const std::complex<double> fx = (shifted(slot, h) - shifted(slot, -h)) / (2 * h);
        const std::complex<double> fy = (shifted(slot, {0, h}) - shifted(slot, {0, -h})) / (2 * h);
        const std::complex<double> fd = 0.5 * (fx - std::complex<double>(0, 1) * fy);
        const std::complex<double> sym = slot == 0 ? dz(pt) : dw(pt);
        EXPECT_LE(std::abs(sym - fd), 1e-6) << p;
      }
    }
  }
}

TEST(Properties, AntiderivativeInverse) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    WPoly p = random_real_poly(rng, 3) * (I * WPoly::z(3, 1) + WPoly::constant(3, 1));
    EXPECT_EQ(p.antiderivative_z(0).deriv(Var::z(0)), p);
    EXPECT_EQ(p.antiderivative_z(1).deriv(Var::z(1)), p);
  }
}

TEST(Properties, RealityAndConjugation) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 30; ++k) {
    WPoly a = random_real_poly(rng), b = random_real_poly(rng);
    EXPECT_TRUE(a.is_real());
    EXPECT_TRUE((a * b).is_real());
    WPoly c = a * (I * z() + w());
    EXPECT_TRUE(c.realify().is_real());
    EXPECT_EQ(c.conjugate().conjugate(), c);
    EXPECT_EQ((c * b).conjugate(), c.conjugate() * b.conjugate());
    EXPECT_EQ((c + b).conjugate(), c.conjugate() + b.conjugate());
  }
}

TEST(Properties, RealPolyEvaluatesReal) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 20; ++k) {
    WPoly p = random_real_poly(rng, 3);
    Point pt{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
    EXPECT_NEAR(eval(p, pt).imag(), 0.0, 1e-10);
  }
}

TEST(Parser, ExampleFunction) {
  WPoly r = parse_wpoly("Im(w) + abs2(z)^2 + 100*abs2(z)^3 + 4*Re(z)*Re(w) - 8*Re(w)^2");
  WPoly zz = z() * zb();
  WPoly expected = WPoly::im_w(2) + zz * zz + q(100) * zz * zz * zz + q(4) * WPoly::re_z(2) * WPoly::re_w(2) -
                   q(8) * WPoly::re_w(2) * WPoly::re_w(2);
  EXPECT_EQ(r, expected);
  EXPECT_EQ(parse_wpoly("Im(w)"), WPoly::im_w(2));
}

TEST(Parser, Errors) {
  EXPECT_THROW(parse_wpoly("z ^ (1/2)"), ParseError);
  EXPECT_THROW(parse_wpoly("z ^ (-1)"), ParseError);
  EXPECT_THROW(parse_wpoly("foo + z"), ParseError);
  EXPECT_THROW(parse_wpoly("(z + "), ParseError);
  try {
    parse_wpoly("Im(w) +\n  z $ 2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 5);
  }
}

TEST(Parser, RoundTripRandomExpressions) {
  std::mt19937_64 rng(2024);
  const char* atoms[] = {"z", "zbar", "w", "wbar", "Re(z)", "Im(z)", "Re(w)", "Im(w)", "abs2(z)", "i", "3/2", "2"};
  std::uniform_int_distribution<int> pick(0, 11), op(0, 3), len(2, 6), ex(1, 3);
  for (int k = 0; k < 50; ++k) {
    std::string src = atoms[pick(rng)];
    const int n = len(rng);
    for (int t = 0; t < n; ++t) {
      std::string a = atoms[pick(rng)];
      switch (op(rng)) {
        case 0: src += " + " + a; break;
        case 1: src += " - " + a; break;
        case 2: src = "(" + src + ")*" + a; break;
        default: src += " + " + a + "^" + std::to_string(ex(rng)); break;
      }
    }
    WPoly p = parse_wpoly(src);
    EXPECT_EQ(parse_wpoly(p.to_string(), 2), p) << src << " -> " << p.to_string();
  }
}

TEST(Parser, Dimension) {
  WPoly p = parse_wpoly("Im(w) + abs2(z1) + abs2(z2)");
  EXPECT_EQ(p.dim(), 3);
  EXPECT_EQ(p, WPoly::im_w(3) + WPoly::abs2_z(3, 0) + WPoly::abs2_z(3, 1));
}
