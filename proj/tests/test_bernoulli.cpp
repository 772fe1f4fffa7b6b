#include "subdyn/bernoulli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace subdyn;

namespace {

AlgebraicInteger golden() { return AlgebraicInteger::from_high_first({1, -1, -1}); }
AlgebraicInteger x2x3() { return AlgebraicInteger::from_high_first({1, -1, -3}); }

BernoulliParams half_lambda(double p) { return BernoulliParams::from_lambda(Mp(512, 0.5), p); }

// prod_n cos(2 pi lambda^n xi) in MPFR, truncated once the factors are 1 to 2^-200.
double cos_product(const Mp& lambda, const Mp& xi) {
    long prec = 400;
    Mp x = xi.with_prec(prec), l = lambda.with_prec(prec);
    Mp two_pi = mp_pi(prec) * Mp(prec, 2.0);
    Mp prod(prec, 1.0);
    for (int n = 0; n < 2000; ++n) {
        Mp a = two_pi * x;
        Mp c(prec);
        mpfr_cos(c.get(), a.get(), MPFR_RNDN);
        prod = prod * c;
        if (std::abs(a.to_double()) < 1e-35) break;
        x = x * l;
    }
    return prod.to_double();
}

} // namespace

TEST(Bernoulli, TrivialValues) {
    auto z = bc_fourier(half_lambda(0.3), 0.0);
    EXPECT_EQ(z.value, std::complex<double>(1.0, 0.0));
    EXPECT_EQ(z.abs_error, 0.0);

    auto q = bc_fourier(half_lambda(0.5), 0.25);
    EXPECT_EQ(std::abs(q.value), 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1e6, 1e6);
    for (int i = 0; i < 50; ++i) {
        auto f = bc_fourier(BernoulliParams::from_theta(x2x3(), 1.0), U(rng));
        EXPECT_NEAR(f.log_modulus, 0.0, 1e-12);
    }
}

TEST(Bernoulli, TailNotConverged) {
    auto b = half_lambda(0.3);
    EXPECT_THROW(bc_fourier(b, 1000.0, 3), Error);
    EXPECT_NO_THROW(bc_fourier(b, 1000.0, 40));
    EXPECT_THROW(BernoulliParams::from_lambda(Mp(64, 1.5), 0.3), Error);
    EXPECT_THROW(BernoulliParams::from_lambda(Mp(64, 0.5), 1.2), Error);
}

TEST(Bernoulli, ModulusAtMostOneAndConjugateSymmetry) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-5e4, 5e4), P(0.0, 1.0);
    auto t = x2x3();
    for (int i = 0; i < 200; ++i) {
        double xi = U(rng), p = P(rng);
        auto b = BernoulliParams::from_theta(t, p);
        auto f = bc_fourier(b, xi), g = bc_fourier(b, -xi);
        EXPECT_LE(f.log_modulus, 1e-15);
        EXPECT_LE(std::abs(f.value - std::conj(g.value)), 1e-12) << xi << " " << p;
        EXPECT_GE(f.abs_error, 0.0);
    }
}

TEST(Bernoulli, UnbiasedMatchesCosineProduct) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 3e3);
    auto t = x2x3();
    auto b = BernoulliParams::from_theta(t, 0.5);
    Mp lam = b.lambda(600);
    for (int i = 0; i < 60; ++i) {
        Mp xi(128, U(rng));
        auto f = bc_fourier(b, xi);
        double want = cos_product(lam, xi);
        EXPECT_NEAR(f.value.real(), want, 1e-12);
        EXPECT_NEAR(f.value.imag(), 0.0, 1e-12);
    }
}

TEST(Bernoulli, TailBoundCoversLongerProducts) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(1.0, 1e3), P(0.05, 0.95);
    auto t = x2x3();
    for (int i = 0; i < 60; ++i) {
        double xi = U(rng), p = P(rng);
        auto b = BernoulliParams::from_theta(t, p);
        int n0 = bc_detail::first_small(b.lambda_double(), xi);
        auto shortp = bc_fourier(b, xi, n0 + 2);
        auto longp = bc_fourier(b, xi, n0 + 60);
        EXPECT_LE(std::abs(shortp.value - longp.value), shortp.abs_error + 1e-14) << xi << " " << p;
    }
}

TEST(Bernoulli, ChainConstant) {
    // |p + (1-p) e^{2 pi i y}| <= 1 - c ||y||^2 on a dense grid.
    for (double p : {0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.99}) {
        double c = bc_chain_constant(p);
        for (int i = 0; i <= 1000; ++i) {
            double y = i / 2000.0;
            double m = std::abs(p + (1 - p) * std::polar(1.0, 2 * M_PI * y));
            EXPECT_LE(m, 1 - c * y * y + 1e-15) << p << " " << y;
        }
    }
    EXPECT_DOUBLE_EQ(bc_chain_constant(0.5), 0.25);
}

TEST(Bernoulli, LogDecayScanChainHolds) {
    std::vector<double> grid{1.0, 1.3, 1.7};
    auto t = x2x3();
    for (double p : {0.3, 0.5}) {
        auto s = bc_log_decay_scan(t, p, 40, grid, 2);
        EXPECT_NEAR(s.alpha, (1.0 / 49.0) / std::log(8.0), 1e-15);
        EXPECT_EQ(s.rows.size(), 41u * 3u);
        EXPECT_TRUE(s.chain_ok);
        for (const auto& r : s.rows) {
            EXPECT_LE(r.modulus - r.abs_error, r.chain * (1 + 1e-12)) << r.N << " " << r.u;
            EXPECT_LE(r.modulus, 1.0 + 1e-15);
        }
        EXPECT_TRUE(std::isfinite(s.sup));
        // Trend: the sup over the upper half of the octaves is below the lower half.
        double lo = 0, hi = 0;
        for (int N = 0; N <= 20; ++N) lo = std::max(lo, s.octave_sup[N]);
        for (int N = 21; N <= 40; ++N) hi = std::max(hi, s.octave_sup[N]);
        EXPECT_LE(hi, lo) << p;
    }
    EXPECT_EQ(bc_scan_at_zero(0.5), std::sqrt(std::log(2.0)));
}

TEST(Bernoulli, LogDecayScanDeterministicAcrossThreads) {
    auto t = x2x3();
    auto a = bc_log_decay_scan(t, 0.3, 12, {1.0, 1.5, 2.0}, 1);
    auto b = bc_log_decay_scan(t, 0.3, 12, {1.0, 1.5, 2.0}, 3);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].value, b.rows[i].value);
        EXPECT_EQ(a.rows[i].chain, b.rows[i].chain);
    }
}

TEST(Bernoulli, LogDecayScanRefusals) {
    EXPECT_THROW(bc_log_decay_scan(golden(), 0.3, 5, {1.0}), Error);
    EXPECT_THROW(bc_log_decay_scan(x2x3(), 0.0, 5, {1.0}), Error);
    EXPECT_THROW(bc_log_decay_scan(x2x3(), 1.0, 5, {1.0}), Error);
    EXPECT_THROW(bc_log_decay_scan(x2x3(), 0.3, 5, {0.5}), Error);
}

TEST(Bernoulli, ErdosGoldenMatchesConjugateOracle) {
    auto e = erdos_nondecay(golden(), 25);
    ASSERT_EQ(e.values.size(), 26u);
    long double phi = (1.0L + std::sqrt(5.0L)) / 2.0L, psi = 1.0L - phi;
    long double tail = 1.0L;
    for (int j = 1; j < 200; ++j) tail *= std::abs(std::cos(2.0L * M_PIl * std::pow(phi, -j)));
    long double head = 1.0L;
    for (int N = 0; N <= 25; ++N) {
        if (N >= 1) head *= std::abs(std::cos(2.0L * M_PIl * std::pow(psi, N)));
        EXPECT_NEAR(e.values[N], static_cast<double>(head * tail), 1e-13) << N;
        if (N > 0) {
            EXPECT_LE(e.running_inf[N], e.running_inf[N - 1]);
        }
    }
    EXPECT_GT(e.floor, 0.0);
    EXPECT_EQ(e.floor, e.running_inf.back());
}

TEST(Bernoulli, ErdosSeparationAndRefusals) {
    auto e = erdos_nondecay(golden(), 25);
    auto t = x2x3();
    auto b = BernoulliParams::from_theta(t, 0.5);
    Mp xi = t.theta(200).mid();
    Mp pw(200, 1.0);
    for (int i = 0; i < 40; ++i) pw = pw * xi;
    double non_pv = std::exp(bc_fourier(b, pw).log_modulus);
    EXPECT_GT(e.floor, non_pv);

    EXPECT_THROW(erdos_nondecay(t, 5), Error);
    auto one = erdos_nondecay(golden(), 0);
    ASSERT_EQ(one.values.size(), 1u);
    auto f = bc_fourier(BernoulliParams::from_theta(golden(), 0.5), 1.0);
    EXPECT_EQ(one.values[0], std::abs(f.value));
}
