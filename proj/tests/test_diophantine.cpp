#include "subdyn/diophantine.hpp"

#include "gen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace subdyn;

namespace {

AlgebraicInteger golden() { return AlgebraicInteger::from_high_first({1, -1, -1}); }
AlgebraicInteger x2x3() { return AlgebraicInteger::from_high_first({1, -1, -3}); }

ZTheta zt(std::vector<long> c) {
    ZTheta z;
    for (long x : c) z.c.emplace_back(x);
    return z;
}

IntPoly poly(std::vector<long long> c) { return IntPoly::from_high_first(c); }

const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

} // namespace

TEST(Diophantine, GoldenPowersAreLucasNumbers) {
    auto a = golden();
    auto seq = pisot_sequence(a, ZTheta::one(2), 300);
    BigInt l0 = 2, l1 = 1;
    Interval psi = (Interval(256, 1.0) - Interval(256, 5.0).sqrt()) / Interval(256, 2.0);
    for (long k = 0; k < 300; ++k) {
        if (k >= 2) {
            EXPECT_EQ(seq.K[k], l0) << k;
            // phi^k + psi^k = L_k, so eps_k = -psi^k with psi = -1/phi.
            Interval want = Interval(256, 0.0) - psi.pow(static_cast<unsigned long>(k));
            EXPECT_NEAR((seq.eps[k].mid() - want.mid()).to_double(), 0.0, 1e-29);
        }
        BigInt l2 = l0 + l1;
        l0 = l1;
        l1 = l2;
    }
    EXPECT_NEAR(seq.dist[10], 0.0081306, 5e-8);
    EXPECT_LE(seq.max_err, 1e-30);
}

TEST(Diophantine, QuadraticExample) {
    auto a = x2x3();
    auto seq = pisot_sequence(a, ZTheta::one(2), 3);
    double th = (1.0 + std::sqrt(13.0)) / 2.0;
    EXPECT_NEAR(seq.dist[1], std::abs(th - std::round(th)), 1e-15);
    EXPECT_NEAR(seq.dist[1], 0.302776, 1e-6);
    EXPECT_NEAR(seq.dist[2], 0.302776, 1e-6);
    EXPECT_EQ(seq.K[2], seq.K[1] + 3);
}

TEST(Diophantine, IntegerTStartsExact) {
    auto a = x2x3();
    auto seq = pisot_sequence(a, ZTheta::integer(2, BigInt(7)), 4);
    EXPECT_EQ(seq.K[0], 7);
    EXPECT_EQ(seq.dist[0], 0.0);
}

TEST(Diophantine, RealPathAgreesWithExactPath) {
    auto a = x2x3();
    auto exact = pisot_sequence(a, zt({2, 1}), 80);
    auto real = pisot_sequence_real(a, [&](long p) { return Interval(p, 2.0) + a.theta(p); }, 80);
    for (long k = 0; k < 80; ++k) {
        EXPECT_EQ(exact.K[k], real.K[k]);
        EXPECT_NEAR(exact.dist[k], real.dist[k], 1e-25);
    }
}

TEST(Diophantine, HalfIntegerIsAmbiguous) {
    auto a = AlgebraicInteger::from_high_first({1, -2});
    try {
        pisot_sequence_real(a, [](long p) { return Interval(p, 0.5); }, 2, 1e-30, 2048);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HalfIntegerAmbiguity);
    }
}

TEST(Diophantine, RecurrenceAndPropagation) {
    std::mt19937_64 rng(17);
    for (auto coeffs : std::vector<std::vector<long long>>{{1, -1, -3}, {1, -1, -1}, {1, 0, -3, -1}, {1, -1, 0, -1}, {1, 0, -4, 0, 2}}) {
        auto a = AlgebraicInteger::from_high_first(coeffs);
        int s = a.degree();
        BigInt h = a.poly().height();
        Interval delta1(128, Rational(1, BigInt(1 + s * h)));
        for (int trial = 0; trial < 4; ++trial) {
            ZTheta t;
            for (int i = 0; i < s; ++i) t.c.emplace_back(std::uniform_int_distribution<long>(-20, 20)(rng));
            if (t.c[0] == 0) t.c[0] = 1;
            auto seq = pisot_sequence(a, t, 120);
            for (long k = 0; k + s < seq.size(); ++k) {
                BigInt r = recurrence_residual(seq, k);
                Interval e = recurrence_eps_side(seq, k);
                EXPECT_TRUE(e.lo() <= Mp(128, r) && Mp(128, r) <= e.hi()) << k;
                bool small = true;
                for (int i = 0; i <= s; ++i) small = small && seq.eps[k + i].mag() < delta1.lo();
                // A short run below delta1 forces the companion recursion on eps.
                if (small) {
                    EXPECT_EQ(r, 0) << k;
                }
            }
        }
    }
}

TEST(Diophantine, PropAlgRefusesPisot) {
    auto a = golden();
    try {
        prop_alg_product(a, ZTheta::one(2), 50);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WrongClass);
    }
    // Diagnostic: the series converges, sum = ||phi||^2 + sum_{k>=2} phi^{-2k}.
    auto d = prop_alg_product(a, ZTheta::one(2), 400, 10, true);
    EXPECT_TRUE(d.hypothesis_violated);
    double sum = std::pow(2.0 - phi, 2) + std::pow(phi, -4) / (1.0 - std::pow(phi, -2));
    EXPECT_NEAR(d.value, std::exp(-sum), 1e-12);
}

TEST(Diophantine, PropAlgProductDecays) {
    auto a = x2x3();
    auto p10 = prop_alg_product(a, ZTheta::one(2), 10);
    auto p100 = prop_alg_product(a, ZTheta::one(2), 100);
    EXPECT_LT(p100.value, p10.value);
    EXPECT_TRUE(p100.monotone);
    auto p = prop_alg_product(a, ZTheta::one(2), 2000);
    EXPECT_NEAR(p.alpha, 0.009815, 1e-6);
    EXPECT_TRUE(p.bound_holds) << p.first_violation;
    EXPECT_LE(p.slope, -p.alpha);
}

TEST(Diophantine, PropAlgSmallTBranch) {
    auto a = x2x3();
    // t = theta - 2 lies in (0, 1).
    auto p = prop_alg_product(a, zt({-2, 1}), 500);
    double th = (1.0 + std::sqrt(13.0)) / 2.0;
    EXPECT_EQ(p.N_start, 2 * static_cast<long>(std::ceil(std::log(1.0 / (th - 2.0)) / std::log(th))));
    EXPECT_EQ(p.prefactor, 1.0);
    EXPECT_TRUE(p.bound_holds);
}

TEST(Diophantine, WindowEscapeQuadratic) {
    auto a = x2x3();
    auto w = window_escape_check(a, ZTheta::one(2), 1, 50);
    EXPECT_EQ(w.delta1, Rational(1, 7));
    EXPECT_EQ(w.beta, 8);
    EXPECT_EQ(w.windows.size(), 50u);
    EXPECT_FALSE(w.first_violation.has_value());
    for (const auto& v : w.windows) {
        EXPECT_TRUE(v.pass);
        EXPECT_GE(v.max_dist, 1.0 / 7.0);
        EXPECT_EQ(v.end, 8 * v.k - 1);
    }
    EXPECT_TRUE(window_escape_check(a, ZTheta::one(2), 60, 50).windows.empty());
}

TEST(Diophantine, WindowEscapeFailsForPisot) {
    auto a = golden();
    EXPECT_THROW(window_escape_check(a, ZTheta::one(2), 1, 20), Error);
    auto w = window_escape_check(a, ZTheta::one(2), 1, 20, true);
    EXPECT_TRUE(w.hypothesis_violated);
    ASSERT_TRUE(w.first_violation.has_value());
    EXPECT_FALSE(w.windows.back().pass);
}

TEST(Diophantine, WindowEscapeOnNonPisotFamily) {
    std::mt19937_64 rng(2);
    for (auto coeffs : std::vector<std::vector<long long>>{{1, -1, -3}, {1, -1, -4}, {1, -2, -4}, {1, 0, -3, -1}, {1, -1, -4, 0, 1}}) {
        auto a = AlgebraicInteger::from_high_first(coeffs);
        ASSERT_EQ(classify(a).cls, PisotClass::HasConjugateOutside);
        int s = a.degree();
        for (int trial = 0; trial < 10; ++trial) {
            ZTheta t;
            for (int i = 0; i < s; ++i) t.c.emplace_back(std::uniform_int_distribution<long>(-9, 9)(rng));
            if (t.c[0] == 0 && t.c[1] == 0) t.c[0] = 1;
            auto w = window_escape_check(a, t, std::nullopt, 50);
            EXPECT_FALSE(w.first_violation.has_value());
            // Failures, if any, stay at the start of the range.
            EXPECT_LE(w.k0_scan_fail, 10) << a.poly().str();
            EXPECT_EQ(static_cast<long>(w.windows.size()), std::max<long>(0, 50 - w.k0 + 1));
        }
    }
}

TEST(Diophantine, EKConstantsHandExamples) {
    auto k = ek_constants({{2.0, 0.0}, {1.0, 0.0}});
    EXPECT_NEAR(k.norm_Theta, 3.0, 1e-15);
    EXPECT_NEAR(k.norm_Theta_inv, 3.0, 1e-15);
    EXPECT_EQ(k.L, 20);
    EXPECT_NEAR(k.rho, 1.0 / 38.0, 1e-15);
    EXPECT_NEAR(k.last_row[0], -2.0, 1e-15);
    EXPECT_NEAR(k.last_row[1], 3.0, 1e-15);

    auto q = ek_constants(poly({1, -1, -3}));
    double t1 = (1.0 + std::sqrt(13.0)) / 2.0, t2 = (1.0 - std::sqrt(13.0)) / 2.0;
    EXPECT_NEAR(q.theta[0].real(), t1, 1e-14);
    EXPECT_NEAR(q.norm_Theta, std::sqrt(13.0), 1e-14);
    EXPECT_NEAR(q.norm_Theta, 3.6056, 5e-5);
    EXPECT_NEAR(q.norm_Theta_inv, (t1 + 1.0) / std::sqrt(13.0), 1e-14);
    EXPECT_NEAR(q.last_row[0], 3.0, 1e-14);
    EXPECT_NEAR(q.last_row[1], 1.0, 1e-14);
    (void)t2;
}

TEST(Diophantine, EKConstantsErrors) {
    auto kind = [](auto f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    EXPECT_EQ(kind([] { ek_constants({{2.0, 0.0}, {2.0, 0.0}}); }), ErrorKind::RepeatedEigenvalue);
    EXPECT_EQ(kind([] { ek_constants({{2.0, 0.0}, {0.0, 0.0}}); }), ErrorKind::ZeroEigenvalue);
    EXPECT_EQ(kind([] { ek_constants(poly({1, -2, 1})); }), ErrorKind::RepeatedEigenvalue);
    EXPECT_EQ(kind([] { ek_constants(poly({1, -3, 0})); }), ErrorKind::ZeroEigenvalue);
    BigMatrix S(2, 2);
    S(0, 0) = 3; S(0, 1) = 1; S(1, 0) = 1; S(1, 1) = 3;
    auto k = ek_constants(S);
    EXPECT_NEAR(k.theta[0].real(), 4.0, 1e-12);
    EXPECT_NEAR(k.theta[1].real(), 2.0, 1e-12);
}

TEST(Diophantine, DimensionHelper) {
    double v = ek_dimension_bound(20, 2, 100, 2.0);
    EXPECT_NEAR(v, std::log(2.0 * 8000.0 * 100.0) / (100.0 * std::log(2.0)), 1e-14);
}

TEST(Diophantine, StepPredictZeroWindow) {
    auto k = ek_constants(poly({1, -1, -3}));
    auto p = ek_step_predict({BigInt(0), BigInt(0)}, k);
    EXPECT_EQ(p.nearest, 0);
    long h = static_cast<long>(std::floor(k.half_width()));
    ASSERT_EQ(static_cast<long>(p.candidates.size()), 2 * h + 1);
    EXPECT_EQ(p.candidates.front(), -h);
    EXPECT_EQ(p.candidates.back(), h);
    EXPECT_LE(static_cast<long>(p.candidates.size()), k.L);
}

namespace {

/// omega sum_j a_j theta_j^n at @p prec from independently certified roots.
Mp ek_value(const std::vector<CMp>& r, const std::vector<std::complex<double>>& a, double w, long n, long prec) {
    CMp s(prec);
    for (size_t j = 0; j < r.size(); ++j) {
        CMp p(Mp(prec, 1.0), Mp(prec, 0.0));
        for (long i = 0; i < n; ++i) p = cmp_mul(p, r[j]);
        s = cmp_add(s, cmp_mul(CMp(Mp(prec, a[j].real()), Mp(prec, a[j].imag())), p));
    }
    return s.re * Mp(prec, w);
}

std::vector<CMp> sorted_roots(const IntPoly& p, long prec) {
    RootSet rs = certify_roots(p, prec);
    std::vector<CMp> out;
    for (auto& b : rs.roots) out.emplace_back(b.re, b.im);
    std::sort(out.begin(), out.end(), [](const CMp& x, const CMp& y) {
        double mx = cmp_abs(x).to_double(), my = cmp_abs(y).to_double();
        if (std::abs(mx - my) > 1e-12) return mx > my;
        return x.im.to_double() > y.im.to_double();
    });
    return out;
}

} // namespace

TEST(Diophantine, StepPredictUniqueCaseIsExact) {
    // Pisot polynomials: the conjugate terms stay small, so every eps stays below rho.
    std::mt19937_64 rng(99);
    long steps = 0, mismatches = 0;
    for (auto coeffs : std::vector<std::vector<long long>>{{1, -1, -1}, {1, 0, -1, -1}, {1, -1, -1, -1}}) {
        IntPoly p = IntPoly::from_high_first(coeffs);
        auto k = ek_constants(p);
        int m = p.degree();
        const long n_max = 160;
        long prec = static_cast<long>(n_max * std::log2(k.theta1)) + 256;
        auto r = sorted_roots(p, prec);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<std::complex<double>> a{{1.0, 0.0}};
            double eta = testgen::uniform(rng, -0.25, 0.25) * k.rho;
            if (m == 2) a.push_back({1.0 + eta, 0.0});
            else if (r[1].im.to_double() != 0.0) {
                double im = testgen::uniform(rng, -0.25, 0.25) * k.rho;
                a.push_back({1.0 + eta, im});
                a.push_back({1.0 + eta, -im});
            } else {
                a.push_back({1.0 + eta, 0.0});
                a.push_back({1.0 - eta, 0.0});
            }
            std::vector<BigInt> K;
            double max_eps = 0.0;
            for (long n = 1; n <= n_max; ++n) {
                Mp x = ek_value(r, a, 1.0, n, prec);
                BigInt kn = mp_floor_int(x + Mp(prec, 0.5));
                max_eps = std::max(max_eps, std::abs((x - Mp(prec, kn)).to_double()));
                K.push_back(kn);
            }
            ASSERT_LT(max_eps, k.rho);
            for (long n = 0; n + m < n_max && steps < 10000; ++n) {
                std::vector<BigInt> win(K.begin() + n, K.begin() + n + m);
                auto pr = ek_step_predict(win, k, max_eps);
                ++steps;
                if (!pr.unique || pr.nearest != K[n + m]) ++mismatches;
            }
        }
    }
    EXPECT_EQ(steps, 10000);
    EXPECT_EQ(mismatches, 0);
}

TEST(Diophantine, StepPredictCandidatesContainTruth) {
    std::mt19937_64 rng(5);
    IntPoly p = poly({1, -1, -3});
    auto k = ek_constants(p);
    const long n_max = 60;
    long prec = 512;
    auto r = sorted_roots(p, prec);
    long uniques = 0, total = 0;
    for (int trial = 0; trial < 100; ++trial) {
        double w = testgen::uniform(rng, 0.5, 2.0);
        std::vector<std::complex<double>> a{{1.0, 0.0}, {testgen::uniform(rng, -2.0, 2.0), 0.0}};
        std::vector<BigInt> K;
        std::vector<double> eps;
        for (long n = 1; n <= n_max; ++n) {
            Mp x = ek_value(r, a, w, n, prec);
            BigInt kn = mp_floor_int(x + Mp(prec, 0.5));
            K.push_back(kn);
            eps.push_back(std::abs((x - Mp(prec, kn)).to_double()));
        }
        for (long n = 0; n + 2 < n_max; ++n) {
            auto pr = ek_step_predict({K[n], K[n + 1]}, k);
            ++total;
            EXPECT_LE(static_cast<long>(pr.candidates.size()), k.L);
            EXPECT_NE(std::find(pr.candidates.begin(), pr.candidates.end(), K[n + 2]), pr.candidates.end());
            if (std::max({eps[n], eps[n + 1], eps[n + 2]}) < k.rho) {
                ++uniques;
                EXPECT_EQ(pr.nearest, K[n + 2]);
            }
        }
    }
    EXPECT_GT(total, 0);
    (void)uniques;
}

TEST(Diophantine, StepPredictFromEigenvalueList) {
    auto k = ek_constants({{2.0, 0.0}, {1.0, 0.0}});
    // K_n = 2^n + 1 satisfies K_{n+2} = 3 K_{n+1} - 2 K_n.
    auto p = ek_step_predict({BigInt(5), BigInt(9)}, k, 0.0);
    EXPECT_TRUE(p.unique);
    EXPECT_EQ(p.nearest, 17);
}

TEST(Diophantine, EKFrequencyIntegerSequence) {
    IntPoly p = poly({1, -1, -1});
    auto f = ek_frequency(p, {{1.0, 0.0}, {1.0, 0.0}}, Frequency(Rational(1)), 200, 0.01);
    EXPECT_EQ(f.count, 0);
    for (double d : f.dist) EXPECT_LT(d, 1e-20);
    auto half = ek_frequency(poly({1, -1, -3}), {{1.0, 0.0}, {0.7, 0.0}}, Frequency::parse("0.3"), 100, 0.5);
    EXPECT_EQ(half.count, 0);
    EXPECT_THROW(ek_frequency(p, {{1.0, 0.0}, {1.0, 0.5}}, Frequency(Rational(1)), 5, 0.1), Error);
}

TEST(Diophantine, EKFrequencyTiling) {
    auto z = Substitution::parse(2, {"1222", "1"});
    auto k = ek_constants(substitution_matrix(z));
    Roof s = Roof::self_similar(z);
    auto f = ek_frequency_tiling(z, Word{0}, s, Frequency::parse("0.3"), 100, k.rho);
    EXPECT_EQ(f.dist.size(), 100u);
    EXPECT_GE(f.count, 0);
    EXPECT_LE(f.count, 100);
    // Unit roof: lengths are integers and the count matches a direct evaluation.
    Roof u = Roof::unit(2);
    Hierarchy h(z);
    Frequency w = Frequency::parse("0.3");
    auto g = ek_frequency_tiling(z, Word{0}, u, w, 60, 0.2);
    long direct = 0;
    for (int n = 1; n <= 60; ++n) direct += w.dist(h.length(n, Word{0})) >= 0.2;
    EXPECT_EQ(g.count, direct);
}
