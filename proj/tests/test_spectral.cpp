#include "subdyn/spectral.hpp"

#include "gen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace subdyn;

namespace {

Substitution example() { return Substitution::parse(2, {"1222", "1"}); }
Substitution thue_morse() { return Substitution::parse(2, {"12", "21"}); }
Substitution fibonacci() { return Substitution::parse(2, {"12", "1"}); }
Substitution sym31() { return Substitution::parse(2, {"1121", "2212"}); }

std::vector<std::complex<double>> indicator(int m, int a) {
    std::vector<std::complex<double>> d(static_cast<size_t>(m), 0.0);
    d[a] = 1.0;
    return d;
}

} // namespace

TEST(Spectral, BirkhoffTrivialCases) {
    auto z = example();
    std::vector<std::complex<double>> d{2.0, -3.0};
    Word x = FixedPoint(z).prefix(57);
    auto s = birkhoff_twisted(z, d, x, Frequency(Rational(0)));
    double want = 0.0;
    for (Letter c : x) want += d[c].real();
    EXPECT_NEAR(s.real(), want, 1e-12);
    EXPECT_NEAR(s.imag(), 0.0, 1e-12);
    auto one = birkhoff_twisted(z, d, Word{1}, Frequency::parse("0.3"));
    EXPECT_NEAR(std::abs(one - d[1]), 0.0, 1e-15);
}

TEST(Spectral, BirkhoffExampleMatchesDirect) {
    auto z = example();
    Word x = Substitution::parse_word(2, "1222111");
    Frequency w = Frequency::parse("0.3");
    auto s = birkhoff_twisted(z, indicator(2, 0), x, w);
    EXPECT_NEAR(std::abs(s - phi_direct(x, 0, w)), 0.0, 1e-9);
}

TEST(Spectral, WindowSumsMatchDirectOnRandomSubstitutions) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 12; ++trial) {
        int m = 2 + trial % 3;
        auto z = testgen::random_primitive(rng, m, 4);
        FixedPoint fp(z);
        Frequency w = Frequency::from_double(testgen::uniform(rng, 0, 1));
        WindowSums ws(fp, w);
        for (int k = 0; k < 6; ++k) {
            long lo = std::uniform_int_distribution<long>(0, 3000)(rng);
            long N = std::uniform_int_distribution<long>(1, 2000)(rng);
            Word x = fp.window(BigInt(lo), static_cast<size_t>(N));
            auto phi = ws.window(BigInt(lo), BigInt(N));
            for (int a = 0; a < m; ++a) EXPECT_NEAR(std::abs(phi[a] - phi_direct(x, static_cast<Letter>(a), w)), 0.0, 1e-9);
        }
    }
}

TEST(Spectral, SuspensionWindowSumsMatchDirect) {
    auto z = example();
    FixedPoint fp(z);
    Roof s = Roof::self_similar(z);
    Roof q = Roof::exact({Rational(2, 7), Rational(5, 7)});
    std::mt19937_64 rng(5);
    for (const Roof* r : {&s, &q}) {
        Frequency w = Frequency::parse("0.7+sqrt(2)", 2048);
        WindowSums ws(fp, w, r);
        for (int k = 0; k < 5; ++k) {
            long lo = std::uniform_int_distribution<long>(0, 500)(rng);
            long N = std::uniform_int_distribution<long>(1, 800)(rng);
            Word x = fp.window(BigInt(lo), static_cast<size_t>(N));
            auto phi = ws.window(BigInt(lo), BigInt(N));
            for (int a = 0; a < 2; ++a)
                EXPECT_NEAR(std::abs(phi[a] - phi_direct_suspension(x, static_cast<Letter>(a), w, *r)), 0.0, 1e-9);
        }
    }
}

TEST(Spectral, GEstimateCoherentAndSupMode) {
    auto z = example();
    auto g = g_estimate(z, {1.0, 1.0}, Frequency(Rational(0)), 100, 16);
    EXPECT_NEAR(g.mean, 100.0, 1e-9);
    EXPECT_NEAR(g.sup, 100.0, 1e-9);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        auto gi = g_estimate(z, {1.0, -0.5}, Frequency::from_double(testgen::uniform(rng, 0, 1)), 37, 8);
        EXPECT_GE(gi.sup, gi.mean);
        EXPECT_GE(gi.mean, gi.min);
    }
}

TEST(Spectral, GEstimateIntegratesToLetterFrequency) {
    // |S_N|^2 has frequencies below N, so the mean over N equally spaced omegas is its integral.
    for (const auto& z : {example(), fibonacci()}) {
        PerronData pd = perron_data(substitution_matrix(z));
        const long N = 512;
        for (int a = 0; a < 2; ++a) {
            double integral = 0.0;
            for (long j = 0; j < N; ++j)
                integral += g_estimate(z, indicator(2, a), Frequency(Rational(j, N)), N, 64).mean;
            integral /= N;
            EXPECT_NEAR(integral, pd.r_d[a], 1e-3);
        }
    }
}

TEST(Spectral, FejerBound) {
    auto b = fejer_ball_bound(10.0, 10);
    EXPECT_NEAR(b.upper, M_PI * M_PI / 4.0, 1e-15);
    EXPECT_TRUE(b.vacuous);
    EXPECT_EQ(fejer_ball_bound(0.0, 7).upper, 0.0);
    EXPECT_FALSE(fejer_ball_bound(0.0, 7).vacuous);
    EXPECT_EQ(fejer_N(0.25), 2);
    EXPECT_EQ(fejer_N(0.5), 1);
    EXPECT_EQ(fejer_N(0.001), 500);
    try {
        fejer_N(0.6);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RadiusTooLarge);
    }
}

TEST(Spectral, VariationBoundMonotoneInRadius) {
    double beta = 0.3;
    auto omega = [&](double r) { return std::pow(r, beta); };
    double prev = 0.0;
    for (double r = 1e-6; r < 0.1; r *= 1.7) {
        double v = variation_bound(2.0, omega, r);
        EXPECT_GT(v, prev);
        EXPECT_NEAR(v, M_PI * M_PI * 2.0 / 4.0 * std::pow(3.0 * r, beta), 1e-12);
        prev = v;
    }
}

TEST(Spectral, DiophConstantsSingleLetter) {
    auto z = Substitution::parse(1, {"11"});
    ReturnWord rw{Word{0}, 0, 1};
    auto k = dioph_constants(z, rw, 20);
    EXPECT_NEAR(k.c1, 0.25, 1e-9);
    EXPECT_LE(k.c1, 1.0 / 3.0);
    EXPECT_NEAR(k.theta, 2.0, 1e-12);
    EXPECT_NEAR(k.c_lo, 1.0, 1e-9);
    EXPECT_NEAR(k.c_hi, 1.0, 1e-9);
}

TEST(Spectral, DiophConstantsExample) {
    auto z = example();
    auto rw = find_return_word(z);
    auto k = dioph_constants(z, rw, 64);
    EXPECT_GT(k.c1, 0.0);
    EXPECT_LT(k.c1, 1.0);
    EXPECT_LE(k.c1, (k.theta - 1.0) / (k.theta + 1.0));
    EXPECT_GT(k.c1_uniform, 0.0);
    EXPECT_LE(k.c1_uniform, k.c1);
    EXPECT_EQ(k.power, 3);
    EXPECT_NEAR(k.theta, std::pow(perron_data(substitution_matrix(z)).theta_d, 3), 1e-9);
}

TEST(Spectral, DiophConstantsAtZeroLevels) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 10; ++t) {
        auto z = testgen::random_primitive(rng, 2 + t % 3, 4);
        auto rw = find_return_word(z);
        auto k = dioph_constants(z, rw, 0);
        Substitution Z = z.power(rw.power);
        size_t rowmax = 0;
        for (const auto& img : Z.images()) rowmax = std::max(rowmax, img.size());
        double want = std::min(1.0 / (2.0 * Z.size() * static_cast<double>(rowmax)), (k.theta - 1.0) / (k.theta + 1.0));
        EXPECT_NEAR(k.c1, want, 1e-10);
    }
}

TEST(Spectral, PerronBoundsHoldOnLongRange) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 8; ++t) {
        auto z = testgen::random_primitive(rng, 2 + t % 3, 3);
        auto k = dioph_constants(z, 5);
        Hierarchy h(k.Z);
        PerronData pd = perron_data(substitution_matrix(k.Z), 256);
        for (int j = 0; j <= 60; ++j) {
            Mp thj(512, 1.0);
            for (int i = 0; i < j; ++i) thj = thj * pd.theta.mid().with_prec(512);
            for (int b = 0; b < k.Z.size(); ++b) {
                double ratio = (Mp(512, h.length(j, static_cast<Letter>(b))) / thj).to_double();
                EXPECT_GE(ratio, k.c_lo);
                EXPECT_LE(ratio, k.c_hi);
            }
        }
    }
}

TEST(Spectral, ProductBoundTrivialCases) {
    auto z = example();
    auto k = dioph_constants(z);
    Hierarchy h(k.Z);
    for (int n = 0; n < 6; ++n) {
        auto p = dioph_product_bound(k, 1, Frequency(Rational(0)), n);
        EXPECT_EQ(p.product, 1.0);
        EXPECT_NEAR(p.bound, k.Cprime * h.length(n, 1).get_d(), 1e-9 * p.bound);
    }
    // Thue-Morse: |Z^k(v)| is even for k >= 1, so only the k = 0 factor is below 1 at omega = 1/2.
    auto tm = thue_morse();
    auto kt = dioph_constants(tm);
    ASSERT_EQ(kt.v.size() % 2, 1u);
    for (int n = 1; n < 8; ++n) {
        auto p = dioph_product_bound(kt, 0, Frequency(Rational(1, 2)), n);
        EXPECT_NEAR(p.product, 1.0 - kt.c1 * 0.25, 1e-15);
    }
}

TEST(Spectral, ProductBoundDominatesRieszEntries) {
    auto z = example();
    auto k = dioph_constants(z);
    Hierarchy h(k.Z);
    std::mt19937_64 rng(4);
    std::vector<Frequency> ws{Frequency::parse("0.3")};
    for (int i = 0; i < 40; ++i) ws.push_back(Frequency::from_double(testgen::uniform(rng, 0, 1)));
    for (const auto& w : ws)
        for (int n = 0; n <= 10; ++n) {
            TwistedProduct T = riesz_product(h, n, w);
            for (int b = 0; b < 2; ++b) {
                double bound = dioph_product_bound(k, static_cast<Letter>(b), w, n).bound;
                for (int a = 0; a < 2; ++a) EXPECT_LE(std::abs(T.at(b, a)), bound);
            }
        }
}

TEST(Spectral, SuspensionProductBoundDominates) {
    auto z = example();
    auto k = dioph_constants(z);
    Hierarchy h(k.Z);
    Roof s = Roof::self_similar(z);
    // The roof of zeta is also self-similar for Z.
    std::mt19937_64 rng(6);
    for (int i = 0; i < 20; ++i) {
        Frequency w = Frequency::from_double(testgen::uniform(rng, 0.1, 4.0));
        for (int n = 0; n <= 6; ++n)
            for (int b = 0; b < 2; ++b) {
                double bound = dioph_product_bound(k, static_cast<Letter>(b), w, n, &s).bound;
                for (int a = 0; a < 2; ++a)
                    EXPECT_LE(std::abs(phi_suspension(h, s, static_cast<Letter>(a), static_cast<Letter>(b), n, w)), bound);
            }
    }
}

TEST(Spectral, BirkhoffBoundDominatesWindowSums) {
    auto z = example();
    auto k = dioph_constants(z);
    FixedPoint fp(z);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 15; ++i) {
        Frequency w = Frequency::from_double(testgen::uniform(rng, 0, 1));
        WindowSums ws(fp, w);
        for (long N : {1L, 10L, 333L, 5000L, 40000L}) {
            double bound = birkhoff_product_bound(k, w, N).bound;
            for (int t = 0; t < 4; ++t) {
                long lo = std::uniform_int_distribution<long>(0, 100000)(rng);
                auto phi = ws.window(BigInt(lo), BigInt(N));
                for (auto v : phi) EXPECT_LE(std::abs(v), bound);
            }
        }
    }
}

TEST(Spectral, GammaFrequencyRationalAndGeneric) {
    auto tm = thue_morse();
    auto g = gamma_frequency(tm, Word{0}, Frequency(Rational(1, 8)), 0.1, 60);
    for (int k = 3; k < 60; ++k) EXPECT_EQ(g.dist[k], 0.0);
    EXPECT_LT(g.liminf_estimate, 0.1);
    auto z = example();
    auto gen = gamma_frequency(z, Word{0}, Frequency::parse("sqrt(2)-1", 1024), 0.1, 200);
    EXPECT_NEAR(gen.liminf_estimate, 0.8, 0.12);
    EXPECT_NEAR(gen.fraction.back(), 0.8, 0.1);
    auto tiny = gamma_frequency(z, Word{0}, Frequency::parse("sqrt(2)-1", 1024), 1e-9, 100);
    EXPECT_EQ(tiny.fraction.back(), 1.0);
}

TEST(Spectral, HolderExponentExamples) {
    EXPECT_NEAR(holder_exponent(2.0, 0.25, 0.5, 0.5).beta, -std::log2(1.0 - 1.0 / 16.0), 1e-15);
    EXPECT_NEAR(holder_exponent(2.0, 0.25, 0.5, 0.5).beta, 0.0931, 5e-5);
    auto d = holder_exponent(3.0, 0.2, 0.3, 0.0);
    EXPECT_EQ(d.beta, 0.0);
    EXPECT_TRUE(d.degenerate);
    EXPECT_LT(holder_exponent(3.0, 1e-9, 1e-3, 1.0).beta, 1e-14);
}

TEST(Spectral, EigenvalueTest) {
    auto tm = thue_morse();
    EXPECT_EQ(eigenvalue_test(tm, Word{0}, Frequency(Rational(1, 8)), 40).verdict, EigenVerdict::Converging);
    EXPECT_EQ(eigenvalue_test(example(), Word{0}, Frequency(Rational(0)), 40).verdict, EigenVerdict::Converging);
    auto k = dioph_constants(example());
    auto e = eigenvalue_test(k.Z, k.v, Frequency::parse("0.3"), 60);
    EXPECT_EQ(e.verdict, EigenVerdict::Diverging);
    // Golden mean rotation on the Fibonacci word: a genuine eigenvalue.
    auto fib = fibonacci();
    auto g = eigenvalue_test(fib, Word{0}, Frequency::parse("sqrt(5/4)-1/2", 2048), 80);
    EXPECT_NE(g.verdict, EigenVerdict::Diverging);
}

TEST(Spectral, LocalDimension) {
    auto z = example();
    auto zero = local_dimension_bound(z, Frequency(Rational(0)), 40);
    EXPECT_EQ(zero.bound, 0.0);
    EXPECT_NEAR(zero.alpha, perron_data(substitution_matrix(z)).theta_d, 1e-12);
    EXPECT_EQ(local_dimension_from_alpha(2.5, 2.5), 0.0);
    EXPECT_NEAR(local_dimension_from_alpha(2.5, std::sqrt(2.5)), 1.0, 1e-15);
    auto ld = local_dimension_bound(z, Frequency::parse("0.3"), 200);
    double th = perron_data(substitution_matrix(z)).theta_d;
    EXPECT_LT(ld.alpha, th);
    EXPECT_GT(ld.bound, 0.0);
    EXPECT_EQ(ld.log_norms.size(), 200u);
}

TEST(Spectral, ZeroExponentScan) {
    auto z = sym31();
    auto r = zero_exponent_scan(z, {1.0, -1.0}, 1L << 16);
    EXPECT_NEAR(r.predicted, 0.5, 1e-9);
    EXPECT_NEAR(r.slope, 0.5, 0.1);
    auto tm = zero_exponent_scan(thue_morse(), {1.0, -1.0}, 1L << 14);
    EXPECT_NEAR(tm.slope, 0.0, 0.1);
    EXPECT_EQ(tm.predicted, 0.0);
    auto zz = zero_exponent_scan(z, {0.0, 0.0}, 1024);
    for (double v : zz.max_abs) EXPECT_EQ(v, 0.0);
    try {
        zero_exponent_scan(z, {1.0, 0.0}, 1024);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotMeanZero);
    }
}
