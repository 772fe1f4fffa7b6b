#include "subdyn/algebraic.hpp"
#include "subdyn/numeric/double_double.hpp"
#include "subdyn/numeric/frequency.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace subdyn;

TEST(DoubleDouble, SinCosMatchesMpfr) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        double x = U(rng);
        DD c, s;
        sincos_turns(DD(x), c, s);
        Mp a(200, x);
        Mp pi2 = mp_pi(200);
        mpfr_mul_ui(pi2.get(), pi2.get(), 2, MPFR_RNDN);
        Mp ang = a * pi2;
        Mp rc(200), rs(200);
        mpfr_sin_cos(rs.get(), rc.get(), ang.get(), MPFR_RNDN);
        Mp dc(200), ds(200);
        mpfr_sub_d(dc.get(), rc.get(), c.hi, MPFR_RNDN);
        mpfr_sub_d(dc.get(), dc.get(), c.lo, MPFR_RNDN);
        mpfr_sub_d(ds.get(), rs.get(), s.hi, MPFR_RNDN);
        mpfr_sub_d(ds.get(), ds.get(), s.lo, MPFR_RNDN);
        EXPECT_LT(std::abs(dc.to_double()), 1e-30);
        EXPECT_LT(std::abs(ds.to_double()), 1e-30);
    }
}

TEST(DoubleDouble, QuarterTurnIsExact) {
    DD c, s;
    sincos_turns(DD(0.25), c, s);
    EXPECT_EQ(c.hi, 0.0);
    EXPECT_EQ(c.lo, 0.0);
    EXPECT_EQ(s.hi, 1.0);
}

TEST(Frequency, ExactTurns) {
    Frequency w = Frequency::parse("0.3");
    EXPECT_EQ(w.rational(), Rational(3, 10));
    DD t = w.turns(BigInt(7));
    EXPECT_NEAR(t.to_double(), 0.1, 1e-16);
    // Leading zeros in the digit string must not switch to octal.
    EXPECT_EQ(Frequency::parse("0.37").rational(), Rational(37, 100));
    EXPECT_EQ(Frequency::parse("010/011").rational(), Rational(10, 11));
    EXPECT_EQ(Frequency::parse("0.25+0.125").rational(), Rational(3, 8));
    Frequency r = Frequency::parse("sqrt(2)-1", 256);
    EXPECT_FALSE(r.is_exact());
    EXPECT_NEAR(r.to_double(), std::sqrt(2.0) - 1.0, 1e-15);
}

TEST(Roots, GoldenAndSalem) {
    auto phi = AlgebraicInteger::from_high_first({1, -1, -1});
    EXPECT_NEAR(phi.theta_double(), (1 + std::sqrt(5.0)) / 2, 1e-15);
    EXPECT_EQ(classify(phi).cls, PisotClass::PV);
    auto salem = AlgebraicInteger::from_high_first({1, -1, -1, -1, 1});
    EXPECT_NEAR(salem.theta_double(), 1.7221, 1e-4);
    EXPECT_EQ(classify(salem).cls, PisotClass::Salem);
    auto q = AlgebraicInteger::from_high_first({1, -1, -3});
    EXPECT_EQ(classify(q).cls, PisotClass::HasConjugateOutside);
    auto k = prop_alg_constants(q);
    EXPECT_EQ(k.delta1, Rational(1, 7));
    EXPECT_EQ(k.beta, 8);
    EXPECT_NEAR(k.alpha, (1.0 / 49) / std::log(8.0), 1e-15);
    EXPECT_NEAR(garsia_lower_bound(q, 1, BigInt(1), 1), 0.24567, 1e-5);
    FracDist d = frac_dist(ZTheta::one(2), q);
    (void)d;
    ZTheta x = ZTheta::one(2);
    x = zt_mul_theta(x, q.poly());
    FracDist d1 = frac_dist(x, q);
    EXPECT_NEAR(d1.dist, 0.302776, 1e-6);
}

TEST(Frequency, MalformedInputIsConfigError) {
    for (const char* bad : {"sqrt(5)/2", "1/", "/3", "1e", "1.2.3", "abc"}) {
        try {
            Frequency::parse(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ConfigError) << bad;
        }
    }
    EXPECT_NEAR(Frequency::parse("sqrt(5/4)-1/2").to_double(), (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
}
