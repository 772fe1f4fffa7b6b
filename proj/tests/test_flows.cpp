#include "subdyn/flows.hpp"

#include "gen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace subdyn;

namespace {

Substitution example() { return Substitution::parse(2, {"1222", "1"}); }
Substitution fibonacci() { return Substitution::parse(2, {"12", "1"}); }
Substitution thue_morse() { return Substitution::parse(2, {"12", "21"}); }
Substitution sym31() { return Substitution::parse(2, {"1121", "2212"}); }

const double kTheta = (1.0 + std::sqrt(13.0)) / 2.0; // x^2 - x - 3

FlowPoint point(const FlowTiling& ft, double X) { return ft.locate(Mp(ft.prec(), X)); }

/// Per-tile Gauss-Legendre quadrature of e^{-2 pi i w tau} 1_a(h_tau x) over [0, R].
std::complex<double> quadrature(const Word& x, const std::vector<double>& s, size_t n, double u, Letter a, double w,
                                double R) {
    static const double gl[5][2] = {{-0.9061798459386640, 0.2369268850561891},
                                    {-0.5384693101056831, 0.4786286704993665},
                                    {0.0, 0.5688888888888889},
                                    {0.5384693101056831, 0.4786286704993665},
                                    {0.9061798459386640, 0.2369268850561891}};
    std::complex<double> acc = 0.0;
    double start = -u;
    for (size_t i = n; i < x.size() && start < R; ++i) {
        double end = start + s[x[i]];
        double lo = std::max(start, 0.0), hi = std::min(end, R);
        if (x[i] == a && hi > lo) {
            // Split long pieces so the 5-point rule stays exact to ~1e-14.
            int parts = 1 + static_cast<int>((hi - lo) * std::abs(w) * 4.0);
            double step = (hi - lo) / parts;
            for (int p = 0; p < parts; ++p) {
                double m = lo + (p + 0.5) * step, h = step / 2.0;
                for (const auto& g : gl) acc += h * g[1] * std::polar(1.0, -2.0 * M_PI * w * (m + h * g[0]));
            }
        }
        start = end;
    }
    return acc;
}

} // namespace

TEST(Flows, SelfSimilarRoofExamples) {
    auto s = self_similar_roof(sym31()).values_d();
    EXPECT_NEAR(s[0], 0.5, 1e-15);
    EXPECT_NEAR(s[1], 0.5, 1e-15);
    auto e = self_similar_roof(example()).values_d();
    EXPECT_NEAR(e[0] / e[1], kTheta, 1e-13);
    EXPECT_NEAR(e[0] + e[1], 1.0, 1e-15);
    auto one = self_similar_roof(Substitution::parse(1, {"11"})).values_d();
    EXPECT_NEAR(one[0], 1.0, 1e-15);
    try {
        self_similar_roof(Substitution::parse(2, {"12", "2"}));
        FAIL() << "expected NotPrimitive";
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::NotPrimitive);
    }
    auto q = simplex_roof({Rational(1), Rational(3)}).exact_values();
    EXPECT_EQ(q[0], Rational(1, 4));
}

TEST(Flows, SelfSimilarLengthIdentity) {
    std::mt19937_64 rng(5);
    std::vector<Substitution> zs{example(), sym31()};
    for (int i = 0; i < 4; ++i) zs.push_back(testgen::random_primitive(rng, 3, 4));
    for (const auto& z : zs) {
        auto f = SuspensionFlow::make_self_similar(z);
        Word v = FixedPoint(z).prefix(7);
        EXPECT_LT(self_similar_length_defect(f, v, 60), 1e-100);
    }
}

TEST(Flows, LocateInvertsPosition) {
    auto f = SuspensionFlow::make_self_similar(example());
    FlowTiling ft(f);
    Word x = ft.fixed_point().prefix(5000);
    const auto& s = f.roof.values_d();
    double pos = 0.0;
    for (size_t n = 0; n < x.size(); ++n) {
        if (n % 97 == 0) {
            auto p = point(ft, pos + 0.25 * s[x[n]]);
            EXPECT_EQ(p.n, BigInt(static_cast<unsigned long>(n)));
            EXPECT_NEAR(p.u.to_double(), 0.25 * s[x[n]], 1e-9);
            EXPECT_NEAR(ft.position(BigInt(static_cast<unsigned long>(n))).to_double(), pos, 1e-9);
        }
        pos += s[x[n]];
    }
}

TEST(Flows, TwistedIntegralMatchesQuadrature) {
    std::mt19937_64 rng(17);
    std::vector<SuspensionFlow> flows{SuspensionFlow::make_self_similar(example()),
                                      SuspensionFlow::make(example(), Roof::unit(2)),
                                      SuspensionFlow::make(sym31(), Roof::exact({Rational(1, 3), Rational(2, 3)}))};
    std::vector<std::string> omegas{"1", "0.37", "sqrt(2)"};
    for (const auto& f : flows) {
        FlowTiling ft(f);
        Word x = ft.fixed_point().prefix(20000);
        const auto& s = f.roof.values_d();
        for (const auto& ws : omegas) {
            Frequency w = Frequency::parse(ws);
            TwistedIntegrator ti(ft, w);
            for (int trial = 0; trial < 15; ++trial) {
                size_t n = std::uniform_int_distribution<size_t>(0, 2000)(rng);
                double frac = testgen::uniform(rng, 0.0, 1.0);
                double P = 0.0;
                for (size_t i = 0; i < n; ++i) P += s[x[i]];
                double u = frac * s[x[n]];
                double R = trial == 0 ? 0.3 * s[x[n]] * (1 - frac) : testgen::uniform(rng, 0.5, 900.0);
                FlowPoint p = point(ft, P + u);
                ASSERT_EQ(p.n, BigInt(static_cast<unsigned long>(n)));
                for (Letter a = 0; a < 2; ++a) {
                    auto got = ti.integral(p, a, Mp(ft.prec(), R));
                    auto want = quadrature(x, s, n, p.u.to_double(), a, w.to_double(), R);
                    EXPECT_LT(std::abs(got.value - want), 1e-8) << ws << " R=" << R;
                    EXPECT_LE(std::abs(got.value), R * (1 + 1e-12));
                    EXPECT_LE(got.correction, 2.0 * f.roof.max() + 1e-12);
                }
            }
        }
    }
}

TEST(Flows, TwistedIntegralZeroFrequencyIsOccupationTime) {
    auto f = SuspensionFlow::make_self_similar(example());
    FlowTiling ft(f);
    Word x = ft.fixed_point().prefix(3000);
    const auto& s = f.roof.values_d();
    double R = 0.0;
    double occ[2] = {0.0, 0.0};
    for (size_t i = 0; i < 2500; ++i) {
        R += s[x[i]];
        occ[x[i]] += s[x[i]];
    }
    R += 0.5 * s[x[2500]];
    occ[x[2500]] += 0.5 * s[x[2500]];
    for (Letter a = 0; a < 2; ++a) {
        auto got = twisted_ergodic_integral(ft, FlowPoint{}, a, Frequency(Rational(0)), Mp(ft.prec(), R));
        EXPECT_NEAR(got.value.real(), occ[a], 1e-9);
        EXPECT_EQ(got.value.imag(), 0.0);
    }
}

TEST(Flows, WordIntegralMatchesAnchoredIntegral) {
    auto f = SuspensionFlow::make_self_similar(example());
    FlowTiling ft(f);
    Word x = ft.fixed_point().prefix(1200);
    Frequency w = Frequency::parse("0.61");
    Mp R = ft.position(BigInt(1200));
    for (Letter a = 0; a < 2; ++a) {
        auto anchored = twisted_ergodic_integral(ft, FlowPoint{}, a, w, R);
        auto word = twisted_word_integral(f, x, a, w);
        EXPECT_LT(std::abs(anchored.value - word), 1e-10);
    }
    try {
        twisted_word_integral(f, Substitution::parse_word(2, "22222"), 0, w);
        FAIL() << "expected NotInLanguage";
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::NotInLanguage);
    }
}

TEST(Flows, FlowProductBoundTrivialCases) {
    auto f = SuspensionFlow::make_self_similar(example());
    DiophConstants k = dioph_constants(f.zeta);
    auto b0 = flow_product_bound(k, f.roof, Frequency(Rational(0)), 1e6);
    EXPECT_DOUBLE_EQ(b0.bound, b0.prefactor * 1e6);
    EXPECT_EQ(b0.product, 1.0);
    double small = std::pow(k.theta, b0.C2_flow) * 0.99;
    auto b1 = flow_product_bound(k, f.roof, Frequency(Rational(1)), small);
    EXPECT_EQ(b1.factors, 0);
    EXPECT_DOUBLE_EQ(b1.bound, b1.prefactor * small);
    EXPECT_GE(b0.prefactor, k.Cdd);
}

TEST(Flows, FlowProductBoundDominatesIntegrals) {
    std::mt19937_64 rng(23);
    auto f = SuspensionFlow::make_self_similar(example());
    DiophConstants k = dioph_constants(f.zeta);
    FlowTiling ft(f);
    for (const char* ws : {"1", "0.5", "sqrt(3)"}) {
        Frequency w = Frequency::parse(ws);
        TwistedIntegrator ti(ft, w);
        for (double R : {std::pow(kTheta, 10), 50.0, 3.0e4}) {
            auto b = flow_product_bound(k, f.roof, w, R);
            for (int i = 0; i < 20; ++i) {
                FlowPoint p = point(ft, testgen::uniform(rng, 0.0, 1e5));
                for (Letter a = 0; a < 2; ++a) EXPECT_LE(std::abs(ti.integral(p, a, Mp(ft.prec(), R)).value), b.bound);
            }
        }
    }
}

TEST(Flows, LogHolderCertificateExample) {
    auto f = SuspensionFlow::make_self_similar(example());
    std::vector<Frequency> omegas{Frequency::parse("1"), Frequency::parse("5/2"), Frequency::parse("sqrt(2)")};
    std::vector<double> rs{1e-2, 1e-4, 1e-8, 1e-12, 1e-16, 1e-20};
    auto c = log_holder_certificate(f, 4.0, omegas, rs, 0, 4);
    ASSERT_TRUE(c.alpha_theta.has_value());
    EXPECT_NEAR(*c.alpha_theta, 1.0 / 49.0 / std::log(8.0), 1e-15);
    EXPECT_NEAR(*c.alpha_theta, 0.009815, 1e-6);
    EXPECT_DOUBLE_EQ(c.gamma, 2.0 * c.c1 * c.alpha);
    EXPECT_GT(c.gamma, 0.0);
    EXPECT_EQ(c.rows.size(), omegas.size() * rs.size());
    for (size_t i = 0; i < omegas.size(); ++i) {
        double prev = INFINITY;
        for (size_t j = 0; j < rs.size(); ++j) {
            const auto& row = c.rows[i * rs.size() + j];
            EXPECT_EQ(row.in_regime, row.r <= c.r0);
            EXPECT_GE(row.fejer, 0.0);
            EXPECT_LT(row.bound, prev);
            prev = row.bound;
        }
    }
    EXPECT_FALSE(c.rows.front().in_regime);
    EXPECT_TRUE(c.rows.back().in_regime);
}

TEST(Flows, LogHolderCertificateRefusals) {
    auto fib = SuspensionFlow::make_self_similar(fibonacci());
    try {
        log_holder_certificate(fib, 4.0, {Frequency(Rational(1))}, {1e-3});
        FAIL() << "expected WrongClass";
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::WrongClass);
    }
    auto f = SuspensionFlow::make_self_similar(example());
    EXPECT_THROW(log_holder_certificate(f, 4.0, {Frequency(Rational(5))}, {1e-3}), Error);
}

TEST(Flows, SecondEigenvectors) {
    auto e = second_eigen(sym31());
    EXPECT_NEAR(e.theta, 4.0, 1e-12);
    EXPECT_NEAR(e.theta2, 2.0, 1e-12);
    EXPECT_TRUE(e.eigen1);
    EXPECT_NEAR(e.e2[0], 1.0, 1e-15);
    EXPECT_NEAR(e.e2[1], -1.0, 1e-15);
    EXPECT_NEAR(e.e2_star[0], 0.5, 1e-15);
    EXPECT_NEAR(e.e2_star[1], -0.5, 1e-15);
    auto x = second_eigen(example());
    EXPECT_NEAR(x.theta2, (1.0 - std::sqrt(13.0)) / 2.0, 1e-12);
    EXPECT_FALSE(x.eigen1);
    for (auto z : {fibonacci(), thue_morse()}) EXPECT_THROW(second_eigen(z), Error);
}

TEST(Flows, SecondEigenvectorOrthogonalToRoof) {
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 15; ++trial) {
        auto z = testgen::random_primitive(rng, 3, 5);
        SecondEigen e;
        try {
            e = second_eigen(z);
        } catch (const Error&) {
            continue;
        }
        auto s = self_similar_roof(z).values_d();
        double dot = 0.0, dual = 0.0;
        for (int j = 0; j < 3; ++j) {
            dot += e.e2[j] * s[j];
            dual += e.e2[j] * e.e2_star[j];
        }
        EXPECT_NEAR(dot, 0.0, 1e-12);
        EXPECT_NEAR(dual, 1.0, 1e-12);
        ++checked;
    }
    EXPECT_GE(checked, 5);
}

TEST(Flows, CocycleTrivialCases) {
    for (auto z : {sym31(), example()}) {
        Cocycle c(SuspensionFlow::make_self_similar(z));
        const FlowTiling& ft = c.tiling();
        FlowPoint p = point(ft, 123.0);
        EXPECT_EQ(c.eval(p, 0.0, 10).value, 0.0);
        for (int n : {0, 17, 400}) {
            FlowPoint q{BigInt(n), Mp(ft.prec())};
            Letter j = ft.letter(BigInt(n));
            auto one = cocycle_phi2(c, q, ft.tile(j), 0);
            EXPECT_DOUBLE_EQ(one.value, c.eigen().e2_star[j]);
            EXPECT_EQ(one.boundary_tiles, 0);
        }
        EXPECT_THROW(c.eval(p, 1.0, c.max_levels() + 1), Error);
    }
    EXPECT_THROW(Cocycle(SuspensionFlow::make_self_similar(fibonacci())), Error);
}

TEST(Flows, CocycleRenormalization) {
    std::mt19937_64 rng(41);
    Cocycle c(SuspensionFlow::make_self_similar(sym31()));
    const FlowTiling& ft = c.tiling();
    int k = c.max_levels() - 1;
    for (int i = 0; i < 100; ++i) {
        double T = testgen::uniform(rng, 0.0, 2000.0);
        double t = std::exp(testgen::uniform(rng, std::log(0.05), std::log(500.0)));
        auto lhs = c.eval_at(Mp(ft.prec(), T) * Mp(ft.prec(), c.theta_z()), c.theta_z() * t, k + 1);
        auto rhs = c.eval_at(Mp(ft.prec(), T), t, k);
        double tol = lhs.error_bound + std::abs(c.theta2_z()) * rhs.error_bound + 1e-9 * (1.0 + std::abs(lhs.value));
        EXPECT_LE(std::abs(lhs.value - c.theta2_z() * rhs.value), tol) << T << " " << t;
    }
}

TEST(Flows, CocycleGrowth) {
    std::mt19937_64 rng(43);
    Cocycle c(SuspensionFlow::make_self_similar(sym31()));
    const FlowTiling& ft = c.tiling();
    double a = c.alpha();
    EXPECT_NEAR(a, 0.5, 1e-12);
    auto sample = [&](double& ratio) {
        double T = testgen::uniform(rng, 0.0, 1e4);
        double t = std::exp(testgen::uniform(rng, std::log(0.01), std::log(std::pow(4.0, 8))));
        auto ev = c.eval_at(Mp(ft.prec(), T), t, 16);
        ratio = (std::abs(ev.value) - ev.error_bound) / std::max(1.0, std::pow(t, a));
    };
    double fit = 0.0, r = 0.0;
    for (int i = 0; i < 100; ++i) {
        sample(r);
        fit = std::max(fit, r);
    }
    double C1 = c.growth_constant();
    EXPECT_LE(fit, C1);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        sample(r);
        if (r > C1) ++violations;
    }
    EXPECT_EQ(violations, 0) << "C1 = " << C1;
}

TEST(Flows, MPhi2Minus) {
    auto f = SuspensionFlow::make_self_similar(sym31());
    EXPECT_NEAR(m_phi2_minus(f, Profile::constant({1.0, -1.0})), 1.0, 1e-15);
    EXPECT_EQ(m_phi2_minus(f, Profile::constant({0.0, 0.0})), 0.0);
    EXPECT_NEAR(m_phi2_minus(f, Profile::constant({1.0, 1.0})), 0.0, 1e-15);
    auto g = SuspensionFlow::make_self_similar(example());
    EXPECT_NEAR(m_phi2_minus(g, Profile::constant({1.0, 1.0})), 0.0, 1e-14);
    // Polynomial profiles integrate exactly: int_0^{1/2} (1 + 6t^2) = 3/4.
    Profile p;
    p.coeffs = {{1.0, 0.0, 6.0}, {0.0}};
    EXPECT_NEAR(m_phi2_minus(f, p), 0.75, 1e-15);
}

TEST(Flows, ErgodicIntegralMatchesTileWalk) {
    std::mt19937_64 rng(47);
    auto f = SuspensionFlow::make_self_similar(example());
    FlowTiling ft(f);
    Word x = ft.fixed_point().prefix(6000);
    const auto& s = f.roof.values_d();
    Profile psi;
    psi.coeffs = {{1.0, -2.0}, {-0.5, 0.0, 3.0}};
    for (int trial = 0; trial < 30; ++trial) {
        size_t n = std::uniform_int_distribution<size_t>(0, 1000)(rng);
        double P = 0.0;
        for (size_t i = 0; i < n; ++i) P += s[x[i]];
        double u = testgen::uniform(rng, 0.0, s[x[n]]);
        double t = testgen::uniform(rng, 0.0, 2000.0);
        double want = 0.0, start = -u;
        for (size_t i = n; start < t; ++i) {
            double lo = std::max(0.0, start), hi = std::min(t, start + s[x[i]]);
            want += psi.integral(x[i], lo - start, hi - start);
            start += s[x[i]];
        }
        EXPECT_NEAR(ergodic_integral(ft, psi, point(ft, P + u), t), want, 1e-8);
    }
}

TEST(Flows, ErgodicDecompositionRemainderExponent) {
    Cocycle c(SuspensionFlow::make_self_similar(sym31()));
    Profile f = Profile::constant({1.0, -1.0});
    std::vector<double> ts{0.0};
    for (double e = 5.0; e <= 12.0 + 1e-9; e += 0.25) ts.push_back(std::pow(4.0, e));
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 5; ++trial) {
        FlowPoint x = point(c.tiling(), testgen::uniform(rng, 0.0, 1e5));
        auto d = ergodic_decomposition_check(c, f, x, ts);
        EXPECT_NEAR(d.m_minus, 1.0, 1e-15);
        EXPECT_EQ(d.rows[0].S, 0.0);
        EXPECT_EQ(d.rows[0].main, 0.0);
        EXPECT_EQ(d.rows[0].remainder, 0.0);
        EXPECT_LT(d.max_exponent, 0.5);
    }
}

TEST(Flows, ErgodicDecompositionDegenerateAndRefusals) {
    Cocycle c(SuspensionFlow::make_self_similar(sym31()));
    FlowPoint x = point(c.tiling(), 77.7);
    Profile zero_m;
    zero_m.coeffs = {{1.0, -4.0}, {1.0, -4.0}};
    auto d = ergodic_decomposition_check(c, zero_m, x, {10.0, 1000.0, 1e5});
    EXPECT_EQ(d.m_minus, 0.0);
    for (const auto& row : d.rows) {
        EXPECT_EQ(row.main, 0.0);
        EXPECT_EQ(row.remainder, row.S);
        EXPECT_LT(std::abs(row.S), std::pow(row.t, 0.5));
    }
    try {
        ergodic_decomposition_check(c, Profile::constant({1.0, 0.0}), x, {10.0});
        FAIL() << "expected NotMeanZero";
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::NotMeanZero);
    }
    Cocycle ex(SuspensionFlow::make_self_similar(example()));
    try {
        ergodic_decomposition_check(ex, Profile::constant({1.0, -kTheta}), point(ex.tiling(), 3.0), {10.0});
        FAIL() << "expected WrongClass";
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::WrongClass);
    }
}

TEST(Flows, ZeroScalingStabilizes) {
    Cocycle c(SuspensionFlow::make_self_similar(sym31()));
    Profile f = Profile::constant({1.0, -1.0});
    auto z = zero_scaling_experiment(c, f, 4, 9, 16, 1.0, 2);
    ASSERT_EQ(z.ratio.size(), 6u);
    EXPECT_NEAR(z.alpha, 0.5, 1e-12);
    EXPECT_LE(z.spread, 0.20);
    for (size_t i = 0; i < z.ratio.size(); ++i) EXPECT_NEAR(z.ratio[i], z.value[i] * z.T[i], 1e-12 * z.ratio[i]);
    EXPECT_LT(z.truncation, 1e-11);
}

TEST(Flows, ZeroScalingHomogeneityAndRefusals) {
    Cocycle c(SuspensionFlow::make_self_similar(sym31()));
    Profile f = Profile::constant({1.0, -1.0});
    auto a = zero_scaling_experiment(c, f, 3, 5, 6);
    auto b = zero_scaling_experiment(c, f, 3, 5, 6, 3.0);
    for (size_t i = 0; i < a.ratio.size(); ++i) EXPECT_NEAR(b.ratio[i], 9.0 * a.ratio[i], 1e-12 * b.ratio[i]);
    Profile zero_m;
    zero_m.coeffs = {{1.0, -4.0}, {1.0, -4.0}};
    try {
        zero_scaling_experiment(c, zero_m, 3, 4);
        FAIL() << "expected DegenerateF";
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::DegenerateF);
    }
    EXPECT_THROW(zero_scaling_experiment(c, Profile::constant({1.0, 1.0}), 3, 4), Error);
    Cocycle ex(SuspensionFlow::make_self_similar(example()));
    EXPECT_THROW(zero_scaling_experiment(ex, Profile::constant({1.0, -kTheta}), 3, 4), Error);
}
