#pragma once
/**
 * @file bernoulli.hpp
 * @brief Biased Bernoulli convolutions nu_lambda^p: truncated Fourier
 *        products with tail bounds, the log-decay scan and the PV non-decay
 *        sequence.
 *
 * nu_lambda^p is the law of sum_n +-lambda^n with P(+) = p, so
 *   hat nu(xi) = prod_n (p e^{-2 pi i lambda^n xi} + (1 - p) e^{2 pi i lambda^n xi}).
 */

#include "subdyn/algebraic.hpp"
#include "subdyn/error.hpp"
#include "subdyn/numeric/double_double.hpp"
#include "subdyn/numeric/mp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

namespace subdyn {

struct BernoulliParams {
    double p = 0.5;
    std::optional<AlgebraicInteger> theta; ///< 1 / lambda when algebraic
    std::optional<Mp> lambda_value;        ///< otherwise lambda at its own precision

    static BernoulliParams from_theta(const AlgebraicInteger& t, double p) {
        require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
        if (!(t.theta_double() > 1.0)) fail(ErrorKind::InvalidArgument, "theta must exceed 1");
        BernoulliParams b;
        b.p = p;
        b.theta = t;
        return b;
    }

    static BernoulliParams from_lambda(const Mp& lambda, double p) {
        require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
        if (!(lambda.sign() > 0 && lambda < Mp(64, 1.0))) fail(ErrorKind::InvalidArgument, "lambda must lie in (0, 1)");
        BernoulliParams b;
        b.p = p;
        b.lambda_value = lambda;
        return b;
    }

    /// lambda to relative precision 2^-prec.
    Mp lambda(long prec) const {
        if (theta) {
            Mp one(prec + 64, 1.0);
            return (one / theta->theta(prec + 32).mid()).with_prec(prec);
        }
        if (lambda_value->prec() < prec)
            fail(ErrorKind::PrecisionExhausted, "lambda carries " + std::to_string(lambda_value->prec()) + " bits, " +
                                                    std::to_string(prec) + " needed");
        return lambda_value->with_prec(prec);
    }

    double lambda_double() const { return theta ? 1.0 / theta->theta_double() : lambda_value->to_double(); }
};

struct BCFourier {
    std::complex<double> value;  ///< truncated product (may underflow; see log_modulus)
    double log_modulus = 0.0;    ///< log |truncated product|
    double arg = 0.0;            ///< arg of the truncated product
    int n_terms = 0;
    double tail_log_bound = 0.0; ///< |log(remaining infinite product)| <= this
    double abs_error = 0.0;      ///< |hat nu - value| <= this
};

namespace bc_detail {

inline long bits_for(const Mp& xi) {
    long e = xi.is_zero() ? 0 : std::max<long>(0, mpfr_get_exp(xi.get()));
    return e + 128;
}

/// Smallest n with 2 pi lambda^n |xi| < 1/2.
inline int first_small(double lambda, double abs_xi) {
    if (abs_xi == 0.0) return 0;
    double n = std::log(1.0 / (4.0 * M_PI * abs_xi)) / std::log(lambda);
    int k = std::max(0, static_cast<int>(std::floor(n)) - 1);
    while (2.0 * M_PI * std::pow(lambda, k) * abs_xi >= 0.5) ++k;
    return k;
}

} // namespace bc_detail

/**
 * Product of the first n_terms factors (a default count when @p n_terms is
 * negative) with a bound on the tail. For |x_n| = 2 pi lambda^n |xi| <= 1/2,
 * |g_n|^2 = 1 - 4p(1-p) sin^2 x_n and |arg g_n| <= |2p-1| |x_n| / (1 - x_n^2).
 */
inline BCFourier bc_fourier(const BernoulliParams& b, const Mp& xi, int n_terms = -1) {
    double lam = b.lambda_double();
    double ax = std::abs(xi.to_double());
    int n0 = bc_detail::first_small(lam, ax);
    if (n_terms < 0) n_terms = n0 + static_cast<int>(std::ceil(20.0 * std::log(10.0) / -std::log(lam)));
    if (n_terms < n0)
        fail(ErrorKind::TailNotConverged, "need at least " + std::to_string(n0) + " factors for |xi| = " + std::to_string(ax));
    BCFourier out;
    out.n_terms = n_terms;
    double p = b.p;
    long prec = bc_detail::bits_for(xi);
    Mp lm = b.lambda(prec + 64);
    Mp x = xi.with_prec(prec + 64);
    double logm = 0.0, arg = 0.0;
    bool zero = false;
    for (int n = 0; n < n_terms; ++n) {
        DD t = dd_from_mp(mp_frac(x));
        CDD e = cis_neg_turns(t);
        double c = e.re.to_double(), s = -e.im.to_double(); // cos, sin of 2 pi x
        std::complex<double> g(c, -(2.0 * p - 1.0) * s);
        double mg = std::abs(g);
        if (mg == 0.0) zero = true;
        else {
            logm += std::log(mg);
            arg += std::arg(g);
        }
        x = x * lm;
    }
    if (ax > 0.0) {
        double xn = 2.0 * M_PI * std::pow(lam, n_terms) * ax;
        double q = 4.0 * p * (1.0 - p);
        double y = q * xn * xn;
        double geo2 = 1.0 / (1.0 - lam * lam), geo1 = 1.0 / (1.0 - lam);
        double mod = y / (2.0 * (1.0 - y)) * geo2;
        double ph = std::abs(2.0 * p - 1.0) * xn / (1.0 - xn * xn) * geo1;
        out.tail_log_bound = mod + ph;
    }
    out.log_modulus = zero ? -std::numeric_limits<double>::infinity() : logm;
    out.arg = arg;
    out.value = zero ? std::complex<double>(0.0, 0.0) : std::polar(std::exp(logm), arg);
    out.abs_error = zero ? 0.0 : std::exp(logm) * std::expm1(out.tail_log_bound);
    return out;
}

inline BCFourier bc_fourier(const BernoulliParams& b, double xi, int n_terms = -1) {
    return bc_fourier(b, Mp(128, xi), n_terms);
}

/// Per-factor constant c with |p + (1-p) e^{2 pi i y}| <= 1 - c ||y||^2.
inline double bc_chain_constant(double p) { return std::min((1.0 - p) / 2.0, 8.0 * p * (1.0 - p)); }

struct BCScanRow {
    int N = 0;
    double u = 0.0;
    double log10_xi = 0.0;
    double xi = 0.0;
    std::complex<double> value;
    double modulus = 0.0;
    double abs_error = 0.0;
    double chain = 0.0; ///< prod_{n <= N} (1 - c ||2 theta^n u||^2)
    double scan = 0.0;  ///< |hat nu| (log(2 + xi))^alpha
    bool chain_holds = false;
};

struct BCLogDecayScan {
    double alpha = 0.0;
    double c = 0.0;
    std::vector<BCScanRow> rows;
    std::vector<double> octave_sup; ///< max scan value per N
    double sup = 0.0;
    bool chain_ok = true;
};

/// Scan value at xi = 0: (log 2)^alpha.
inline double bc_scan_at_zero(double alpha) { return std::pow(std::log(2.0), alpha); }

/**
 * |hat nu^p_{1/theta}(xi)| (log(2 + xi))^alpha on xi = theta^N u, 0 <= N <=
 * N_max, u in @p u_grid inside [1, theta], next to the bound chain.
 */
inline BCLogDecayScan bc_log_decay_scan(const AlgebraicInteger& theta, double p, int N_max, const std::vector<double>& u_grid,
                                        int threads = 1) {
    require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
    require(N_max >= 0, "N_max must be >= 0");
    require(!u_grid.empty(), "empty u grid");
    double th = theta.theta_double();
    for (double u : u_grid) require(u >= 1.0 && u <= th * (1.0 + 1e-12), "u must lie in [1, theta]");
    PropAlgConstants k = prop_alg_constants(theta);
    BCLogDecayScan out;
    out.alpha = k.alpha;
    out.c = bc_chain_constant(p);
    BernoulliParams bp = BernoulliParams::from_theta(theta, p);
    size_t per = u_grid.size();
    out.rows.resize(static_cast<size_t>(N_max + 1) * per);
    auto work = [&](size_t idx) {
        int N = static_cast<int>(idx / per);
        double u = u_grid[idx % per];
        long prec = static_cast<long>(std::ceil(N * std::log2(th))) + 160;
        Interval T = theta.theta(prec);
        Mp tm = T.mid();
        Mp uu(prec, u);
        Mp tn(prec, 1.0);
        for (int i = 0; i < N; ++i) tn = tn * tm;
        Mp xi = tn * uu;
        BCScanRow r;
        r.N = N;
        r.u = u;
        r.xi = xi.to_double();
        r.log10_xi = std::log10(r.xi);
        auto f = bc_fourier(bp, xi);
        r.value = f.value;
        r.modulus = std::exp(f.log_modulus);
        r.abs_error = f.abs_error;
        // ||2 theta^n u|| for n = 0..N.
        double logc = 0.0;
        Mp y = uu * Mp(prec, 2.0);
        for (int n = 0; n <= N; ++n) {
            double fr = mp_frac(y).to_double();
            double d = std::min(fr, 1.0 - fr);
            logc += std::log1p(-out.c * d * d);
            y = y * tm;
        }
        r.chain = std::exp(logc);
        r.scan = r.modulus * std::pow(std::log(2.0 + r.xi), out.alpha);
        r.chain_holds = r.modulus - r.abs_error <= r.chain * (1.0 + 1e-12);
        out.rows[idx] = r;
    };
    threads = std::max(1, threads);
    std::vector<std::thread> pool;
    size_t total = out.rows.size();
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (size_t i = static_cast<size_t>(t); i < total; i += static_cast<size_t>(threads)) work(i);
        });
    for (auto& th_ : pool) th_.join();
    out.octave_sup.assign(static_cast<size_t>(N_max + 1), 0.0);
    for (const auto& r : out.rows) {
        out.octave_sup[r.N] = std::max(out.octave_sup[r.N], r.scan);
        out.sup = std::max(out.sup, r.scan);
        out.chain_ok = out.chain_ok && r.chain_holds;
    }
    return out;
}

struct ErdosNonDecay {
    std::vector<double> values;      ///< |hat nu_lambda(theta^N)|, N = 0..N_max
    std::vector<double> running_inf;
    double floor = 0.0;              ///< min of the values
};

/// Unbiased |hat nu_{1/theta}(theta^N)| for a PV theta.
inline ErdosNonDecay erdos_nondecay(const AlgebraicInteger& theta, int N_max) {
    require(N_max >= 0, "N_max must be >= 0");
    Classification c = classify(theta);
    if (c.cls != PisotClass::PV) fail(ErrorKind::WrongClass, std::string("needs a PV number, got ") + class_name(c.cls));
    BernoulliParams bp = BernoulliParams::from_theta(theta, 0.5);
    double th = theta.theta_double();
    ErdosNonDecay out;
    double inf = INFINITY;
    for (int N = 0; N <= N_max; ++N) {
        long prec = static_cast<long>(std::ceil(N * std::log2(th))) + 160;
        Mp tm = theta.theta(prec).mid();
        Mp xi(prec, 1.0);
        for (int i = 0; i < N; ++i) xi = xi * tm;
        auto f = bc_fourier(bp, xi);
        double v = std::exp(f.log_modulus);
        out.values.push_back(v);
        inf = std::min(inf, v);
        out.running_inf.push_back(inf);
    }
    out.floor = inf;
    return out;
}

} // namespace subdyn
