#pragma once
/**
 * @file diophantine.hpp
 * @brief Nearest-integer sequences t theta^k in Z[theta], the product
 *        exp(-sum ||t theta^k||^2) with its window-escape structure, and the
 *        Erdos-Kahane constants rho, L with step prediction and frequency counts.
 */

#include "subdyn/algebraic.hpp"
#include "subdyn/error.hpp"
#include "subdyn/numeric/frequency.hpp"
#include "subdyn/numeric/interval.hpp"
#include "subdyn/numeric/polynomial.hpp"
#include "subdyn/roof.hpp"
#include "subdyn/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace subdyn {

/// t theta^k = K_k + eps_k for k = 0..N-1.
struct PisotSequence {
    IntPoly minpoly;
    std::vector<BigInt> K;
    std::vector<Interval> eps; ///< certified enclosures, 128-bit endpoints
    std::vector<double> dist;  ///< |eps_k|
    double max_err = 0.0;

    long size() const { return static_cast<long>(K.size()); }
};

namespace dioph_detail {

inline long theta_bits(const AlgebraicInteger& a) {
    return static_cast<long>(std::ceil(std::log2(std::max(2.0, a.theta_double())))) + 1;
}

inline void push(PisotSequence& seq, const FracDist& f) {
    seq.K.push_back(f.nearest);
    seq.eps.push_back(f.eps.with_prec(128));
    seq.dist.push_back(f.dist);
    seq.max_err = std::max(seq.max_err, f.err);
}

} // namespace dioph_detail

/**
 * Exact path: t in Z[theta], x_{k+1} = theta x_k in power-basis coordinates,
 * each term rounded with a certified enclosure of width <= @p err.
 */
inline PisotSequence pisot_sequence(const AlgebraicInteger& a, const ZTheta& t, long N, double err = 1e-30) {
    require(N >= 0 && N <= 100000, "pisot_sequence needs 0 <= N <= 1e5");
    require(static_cast<int>(t.c.size()) == a.degree(), "t has the wrong dimension for Z[theta]");
    PisotSequence seq;
    seq.minpoly = a.poly();
    long tb = static_cast<long>(std::ceil(-std::log2(std::max(err, 1e-300))));
    long guard = bit_length(a.poly().height()) * a.degree() + 64;
    long prec_max = t.max_bits() + N * dioph_detail::theta_bits(a) + tb + guard + 64;
    Interval th = a.theta(prec_max);
    ZTheta x = t;
    for (long k = 0; k < N; ++k) {
        long prec = x.max_bits() + a.degree() * dioph_detail::theta_bits(a) + tb + 64;
        FracDist f;
        Interval v = zt_value(x, th.with_prec(std::min(prec, th.prec())));
        if (!alg_detail::split_nearest(v, f) || f.err > err) f = frac_dist(x, a, err);
        dioph_detail::push(seq, f);
        x = zt_mul_theta(x, a.poly());
    }
    return seq;
}

/// Certified-real path: @p t returns an enclosure of t at a requested precision.
inline PisotSequence pisot_sequence_real(const AlgebraicInteger& a, const std::function<Interval(long)>& t, long N,
                                         double err = 1e-30, long max_bits = 1L << 20) {
    require(N >= 0 && N <= 100000, "pisot_sequence needs 0 <= N <= 1e5");
    PisotSequence seq;
    seq.minpoly = a.poly();
    long tb = static_cast<long>(std::ceil(-std::log2(std::max(err, 1e-300))));
    double tmag = std::abs(t(128).mid().to_double());
    long tbits = tmag > 1.0 ? static_cast<long>(std::ceil(std::log2(tmag))) : 0;
    for (long k = 0; k < N; ++k) {
        long start = tbits + k * dioph_detail::theta_bits(a) + tb + 64;
        auto enclose = [&](long p) { return t(p) * a.theta(p).pow(static_cast<unsigned long>(k)); };
        dioph_detail::push(seq, frac_dist_real(enclose, start, err, max_bits));
    }
    return seq;
}

/**
 * Integer side of the recurrence at k:
 * K_{k+s} - b_1 K_{k+s-1} - ... - b_s K_k, which equals minus the same
 * combination of eps.
 */
inline BigInt recurrence_residual(const PisotSequence& seq, long k) {
    int s = seq.minpoly.degree();
    require(k >= 0 && k + s < seq.size(), "recurrence_residual index out of range");
    BigInt r = 0;
    for (int i = 0; i <= s; ++i) r += seq.minpoly.coeff(i) * seq.K[k + i];
    return r;
}

inline Interval recurrence_eps_side(const PisotSequence& seq, long k) {
    int s = seq.minpoly.degree();
    require(k >= 0 && k + s < seq.size(), "recurrence_eps_side index out of range");
    Interval r(128, 0.0);
    for (int i = 0; i <= s; ++i) r = r + Interval(128, seq.minpoly.coeff(i)) * seq.eps[k + i];
    return Interval(128, 0.0) - r;
}

struct PropAlgProduct {
    long N = 0;
    std::vector<double> log_values; ///< log exp(-sum_{k<n}) for n = 1..N
    double value = 1.0;
    double t_value = 0.0;
    bool hypothesis_violated = false;
    std::optional<PropAlgConstants> consts;
    double alpha = 0.0;
    double prefactor = 1.0;      ///< (log(1+t))^{1/log beta} for t >= 1, else 1
    long N_start = 1;            ///< first N where the bound applies
    long fit_N = 10;
    double C = 0.0;
    bool bound_holds = true;
    long first_violation = -1;
    bool monotone = true;
    double slope = 0.0;          ///< least-squares slope of log value vs log N

    double bound(long n) const { return C * prefactor * std::pow(static_cast<double>(n), -alpha); }
};

/**
 * exp(-sum_{k<N} ||t theta^k||^2) for n = 1..N, with C fitted as the smallest
 * constant making the bound hold for N_start <= n <= fit_N; the check then runs
 * over the whole range. PV and Salem inputs are refused unless @p diagnostic.
 */
inline PropAlgProduct prop_alg_product(const AlgebraicInteger& a, const ZTheta& t, long N, long fit_N = 10,
                                       bool diagnostic = false) {
    require(N >= 1, "prop_alg_product needs N >= 1");
    PropAlgProduct out;
    out.N = N;
    Classification c = classify(a);
    if (c.cls != PisotClass::HasConjugateOutside) {
        if (!diagnostic)
            fail(ErrorKind::WrongClass, std::string("needs a conjugate outside the unit circle, got ") + class_name(c.cls));
        out.hypothesis_violated = true;
    } else {
        out.consts = prop_alg_constants(a);
        out.alpha = out.consts->alpha;
    }
    out.t_value = std::abs(zt_value(t, a.theta(256)).mid().to_double());
    require(out.t_value > 0.0, "t must be nonzero");
    double logth = std::log(a.theta_double());
    if (out.t_value >= 1.0) {
        out.N_start = 1;
        if (out.consts) out.prefactor = std::pow(std::log1p(out.t_value), 1.0 / std::log(static_cast<double>(out.consts->beta)));
    } else {
        out.N_start = 2 * static_cast<long>(std::ceil(std::log(1.0 / out.t_value) / logth));
    }
    PisotSequence seq = pisot_sequence(a, t, N);
    double acc = 0.0;
    for (long k = 0; k < N; ++k) {
        acc -= seq.dist[k] * seq.dist[k];
        out.log_values.push_back(acc);
    }
    out.value = std::exp(acc);
    for (long n = 2; n <= N; ++n)
        if (out.log_values[n - 1] > out.log_values[n - 2]) out.monotone = false;
    out.fit_N = std::max(fit_N, out.N_start);
    for (long n = out.N_start; n <= std::min(out.fit_N, N); ++n)
        out.C = std::max(out.C, std::exp(out.log_values[n - 1]) * std::pow(static_cast<double>(n), out.alpha) / out.prefactor);
    for (long n = out.N_start; n <= N; ++n)
        if (std::exp(out.log_values[n - 1]) > out.bound(n) * (1.0 + 1e-12)) {
            out.bound_holds = false;
            if (out.first_violation < 0) out.first_violation = n;
        }
    // Log-spaced sample of the curve beyond the fit point.
    std::vector<double> xs, ys;
    long last = 0;
    for (double x = static_cast<double>(std::max<long>(out.fit_N, 1)); x <= static_cast<double>(N); x *= 1.1) {
        long n = static_cast<long>(std::llround(x));
        if (n == last || n > N) continue;
        last = n;
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(out.log_values[n - 1]);
    }
    if (xs.size() >= 2) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
        mx /= xs.size();
        my /= ys.size();
        double sxy = 0, sxx = 0;
        for (size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
        out.slope = sxy / sxx;
    }
    return out;
}

struct WindowVerdict {
    long k = 0;
    long end = 0;    ///< last index k beta - 1
    long argmax = 0;
    double max_dist = 0.0;
    bool pass = false;
};

struct WindowEscape {
    Rational delta1;
    long beta = 0;
    long t_term = 0;      ///< ceil(s log t / log|theta_2|), clipped at 0
    long K = 0;           ///< empirical constant, including the safety margin
    long k0 = 1;
    long k0_scan_fail = 0; ///< largest failing k found by the downward scan, 0 if none
    bool hypothesis_violated = false;
    std::vector<WindowVerdict> windows;
    std::optional<long> first_violation;
};

/**
 * For each k in [k0, k_max], checks that some i in [k, k beta - 1] has
 * ||t theta^i|| >= delta1. Without @p k0 the unnamed constant K is found by a
 * downward scan from k_max to the first failing window, plus @p margin.
 */
inline WindowEscape window_escape_check(const AlgebraicInteger& a, const ZTheta& t, std::optional<long> k0, long k_max,
                                        bool diagnostic = false, long margin = 5) {
    WindowEscape out;
    int s = a.degree();
    double theta2_mod = 0.0;
    Classification c = classify(a);
    if (c.cls == PisotClass::HasConjugateOutside) {
        PropAlgConstants pc = prop_alg_constants(a);
        out.delta1 = pc.delta1;
        out.beta = pc.beta;
        theta2_mod = pc.theta2_modulus;
    } else {
        if (!diagnostic)
            fail(ErrorKind::WrongClass, std::string("needs a conjugate outside the unit circle, got ") + class_name(c.cls));
        out.hypothesis_violated = true;
        BigInt h = 0;
        for (int i = 0; i < s; ++i) h = std::max(h, BigInt(abs(a.poly().coeff(i))));
        out.delta1 = Rational(1, BigInt(1 + s * h));
        // No conjugate outside: pretend log theta / log|theta_2| = 1.
        out.beta = 1 + s;
    }
    double tv = std::abs(zt_value(t, a.theta(256)).mid().to_double());
    require(tv > 0.0, "t must be nonzero");
    if (theta2_mod > 1.0 && tv > 1.0)
        out.t_term = static_cast<long>(std::ceil(s * std::log(tv) / std::log(theta2_mod)));
    if (k_max < 1) {
        out.k0 = k0.value_or(1);
        return out;
    }
    long len = k_max * out.beta;
    PisotSequence seq = pisot_sequence(a, t, len);
    Interval d1i(128, out.delta1);
    auto verdict = [&](long k) {
        WindowVerdict v;
        v.k = k;
        v.end = k * out.beta - 1;
        for (long i = k; i <= v.end; ++i) {
            if (seq.dist[i] > v.max_dist) {
                v.max_dist = seq.dist[i];
                v.argmax = i;
            }
            // Pass only when the certified |eps_i| clears delta1.
            if (seq.eps[i].mig() >= d1i.hi()) v.pass = true;
        }
        return v;
    };
    if (k0) {
        out.k0 = *k0;
    } else {
        for (long k = k_max; k >= 1; --k)
            if (!verdict(k).pass) {
                out.k0_scan_fail = k;
                break;
            }
        out.K = out.k0_scan_fail > 0 ? std::max<long>(0, out.k0_scan_fail + margin - out.t_term) : 0;
        out.k0 = out.t_term + out.K + 1;
    }
    for (long k = std::max<long>(1, out.k0); k <= k_max; ++k) {
        WindowVerdict v = verdict(k);
        if (!v.pass && !out.first_violation) out.first_violation = k;
        out.windows.push_back(v);
    }
    return out;
}

struct EKConstants {
    std::vector<std::complex<double>> theta; ///< theta_1 (largest modulus) first
    double theta1 = 0.0;
    double norm_Theta = 0.0;
    double norm_Theta_inv = 0.0;
    double x = 0.0;     ///< theta_1 ||Theta|| ||Theta^{-1}||
    double rho = 0.0;
    double L_real = 0.0;
    long L = 0;         ///< bound on the number of integers in the prediction slab
    std::optional<IntPoly> poly;
    std::vector<double> last_row; ///< row m-1 of Theta Diag[theta] Theta^{-1}

    int m() const { return static_cast<int>(theta.size()); }
    double half_width() const { return (1.0 + x) / 2.0; }
};

namespace dioph_detail {

using CLD = std::complex<long double>;

inline std::vector<CLD> invert(std::vector<CLD> A, int n) {
    std::vector<CLD> I(static_cast<size_t>(n) * n, CLD(0));
    for (int i = 0; i < n; ++i) I[static_cast<size_t>(i) * n + i] = 1;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[static_cast<size_t>(r) * n + col]) > std::abs(A[static_cast<size_t>(piv) * n + col])) piv = r;
        if (std::abs(A[static_cast<size_t>(piv) * n + col]) == 0.0L) fail(ErrorKind::RepeatedEigenvalue, "singular Vandermonde matrix");
        for (int j = 0; j < n; ++j) {
            std::swap(A[static_cast<size_t>(col) * n + j], A[static_cast<size_t>(piv) * n + j]);
            std::swap(I[static_cast<size_t>(col) * n + j], I[static_cast<size_t>(piv) * n + j]);
        }
        CLD p = A[static_cast<size_t>(col) * n + col];
        for (int j = 0; j < n; ++j) {
            A[static_cast<size_t>(col) * n + j] /= p;
            I[static_cast<size_t>(col) * n + j] /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            CLD f = A[static_cast<size_t>(r) * n + col];
            if (f == CLD(0)) continue;
            for (int j = 0; j < n; ++j) {
                A[static_cast<size_t>(r) * n + j] -= f * A[static_cast<size_t>(col) * n + j];
                I[static_cast<size_t>(r) * n + j] -= f * I[static_cast<size_t>(col) * n + j];
            }
        }
    }
    return I;
}

inline double norm_inf(const std::vector<CLD>& A, int n) {
    long double best = 0;
    for (int i = 0; i < n; ++i) {
        long double s = 0;
        for (int j = 0; j < n; ++j) s += std::abs(A[static_cast<size_t>(i) * n + j]);
        best = std::max(best, s);
    }
    return static_cast<double>(best);
}

/// Roots ordered as in AlgebraicInteger: theta first, then decreasing modulus.
inline std::vector<CMp> ordered_roots(const IntPoly& p, long prec) {
    AlgebraicInteger a = AlgebraicInteger::from_poly(p, prec);
    std::vector<CMp> out;
    for (const auto& r : a.roots()) out.emplace_back(r.re, r.im);
    return out;
}

} // namespace dioph_detail

/// rho, L and the Vandermonde norms for distinct nonzero eigenvalues.
inline EKConstants ek_constants(std::vector<std::complex<double>> eig) {
    int m = static_cast<int>(eig.size());
    require(m >= 1, "ek_constants needs at least one eigenvalue");
    double scale = 0.0;
    for (auto z : eig) scale = std::max(scale, std::abs(z));
    for (int i = 0; i < m; ++i) {
        if (std::abs(eig[i]) <= 1e-14 * std::max(1.0, scale)) fail(ErrorKind::ZeroEigenvalue, "zero eigenvalue");
        for (int j = 0; j < i; ++j)
            if (std::abs(eig[i] - eig[j]) <= 1e-12 * std::max(1.0, scale)) fail(ErrorKind::RepeatedEigenvalue, "repeated eigenvalue");
    }
    EKConstants k;
    k.theta = eig;
    k.theta1 = scale;
    using dioph_detail::CLD;
    std::vector<CLD> V(static_cast<size_t>(m) * m);
    for (int j = 0; j < m; ++j) {
        CLD p = 1;
        for (int i = 0; i < m; ++i) {
            V[static_cast<size_t>(i) * m + j] = p;
            p *= CLD(eig[j].real(), eig[j].imag());
        }
    }
    std::vector<CLD> Vi = dioph_detail::invert(V, m);
    k.norm_Theta = dioph_detail::norm_inf(V, m);
    k.norm_Theta_inv = dioph_detail::norm_inf(Vi, m);
    k.x = k.theta1 * k.norm_Theta * k.norm_Theta_inv;
    k.rho = 0.5 / (1.0 + k.x);
    k.L_real = 2.0 + k.x;
    k.L = static_cast<long>(std::floor(k.x * (1.0 + 1e-12))) + 2;
    for (int j = 0; j < m; ++j) {
        CLD s = 0;
        for (int l = 0; l < m; ++l)
            s += V[static_cast<size_t>(m - 1) * m + l] * CLD(eig[l].real(), eig[l].imag()) * Vi[static_cast<size_t>(l) * m + j];
        k.last_row.push_back(static_cast<double>(s.real()));
    }
    return k;
}

/// Eigenvalues as the roots of a squarefree integer polynomial; the step matrix is then its companion matrix.
inline EKConstants ek_constants(const IntPoly& p) {
    require(p.degree() >= 1 && p.is_monic(), "ek_constants needs a monic polynomial");
    if (p.coeff(0) == 0) fail(ErrorKind::ZeroEigenvalue, "characteristic polynomial has a zero root");
    if (!is_squarefree(p)) fail(ErrorKind::RepeatedEigenvalue, "characteristic polynomial is not squarefree");
    std::vector<std::complex<double>> eig;
    for (const auto& r : dioph_detail::ordered_roots(p, 128)) eig.emplace_back(r.re.to_double(), r.im.to_double());
    EKConstants k = ek_constants(eig);
    k.poly = p;
    return k;
}

inline EKConstants ek_constants(const BigMatrix& S) { return ek_constants(charpoly(S)); }

/// log(2 L^{m+1} k) / (k log|theta_{m-q}|).
inline double ek_dimension_bound(long L, int m, long k, double theta_mq_modulus) {
    require(k >= 1 && theta_mq_modulus > 1.0, "ek_dimension_bound needs k >= 1 and |theta| > 1");
    return (std::log(2.0) + (m + 1) * std::log(static_cast<double>(L)) + std::log(static_cast<double>(k))) /
           (static_cast<double>(k) * std::log(theta_mq_modulus));
}

struct StepPrediction {
    Mp center{128};
    BigInt nearest;
    std::vector<BigInt> candidates;
    bool unique = false;
};

/**
 * Candidates for K_{n+m} given K_n..K_{n+m-1}: the integers within
 * (1 + theta_1 ||Theta|| ||Theta^{-1}||)/2 of (Theta Diag Theta^{-1} K)_m.
 * With @p eps_bound below rho the answer is the nearest integer.
 */
inline StepPrediction ek_step_predict(const std::vector<BigInt>& window, const EKConstants& k,
                                      std::optional<double> eps_bound = std::nullopt) {
    int m = k.m();
    require(static_cast<int>(window.size()) == m, "window length must equal the number of eigenvalues");
    long bits = 64;
    for (const auto& x : window) bits = std::max(bits, bit_length(x));
    long prec = bits + 96;
    StepPrediction out;
    if (k.poly) {
        BigInt c = 0;
        for (int i = 0; i < m; ++i) c -= k.poly->coeff(i) * window[i];
        out.center = Mp(prec, c);
    } else {
        Mp c(prec, 0.0);
        for (int i = 0; i < m; ++i) c = c + Mp(prec, k.last_row[i]) * Mp(prec, window[i]);
        out.center = c;
    }
    out.nearest = mp_floor_int(out.center + Mp(prec, 0.5));
    if (eps_bound && *eps_bound < k.rho) {
        out.unique = true;
        out.candidates = {out.nearest};
        return out;
    }
    Mp h(prec, k.half_width());
    BigInt lo = mp_floor_int(out.center - h);
    if (Mp(prec, lo) < out.center - h) lo += 1;
    BigInt hi = mp_floor_int(out.center + h);
    for (BigInt v = lo; v <= hi; ++v) out.candidates.push_back(v);
    out.unique = out.candidates.size() == 1;
    return out;
}

struct EKFrequency {
    long N = 0;
    long count = 0;
    double rho = 0.0;
    std::vector<double> dist; ///< ||omega x_n|| for n = 1..N
};

namespace dioph_detail {

inline void tally(EKFrequency& out, double d) {
    out.dist.push_back(d);
    if (d >= out.rho) ++out.count;
}

} // namespace dioph_detail

/**
 * #{n in [1,N] : ||omega sum_j a_j theta_j^n|| >= rho}, the theta_j being the
 * roots of @p p in the order of ek_constants. a_1 = 1 and the a_j must be
 * closed under conjugation so that the sum is real.
 */
inline EKFrequency ek_frequency(const IntPoly& p, const std::vector<std::complex<double>>& a, const Frequency& w,
                                long N, double rho) {
    int m = p.degree();
    require(static_cast<int>(a.size()) == m, "need one coefficient per eigenvalue");
    require(a[0] == std::complex<double>(1.0, 0.0), "a_1 must be 1");
    require(N >= 0, "N must be nonnegative");
    EKFrequency out;
    out.N = N;
    out.rho = rho;
    double th = 1.0, amax = 1.0;
    for (auto z : a) amax = std::max(amax, std::abs(z));
    auto roots0 = dioph_detail::ordered_roots(p, 128);
    for (const auto& r : roots0) th = std::max(th, cmp_abs(r).to_double());
    long prec = static_cast<long>(std::ceil(N * std::log2(th) + std::log2(amax))) + 192;
    auto roots = dioph_detail::ordered_roots(p, prec);
    std::vector<CMp> pw(static_cast<size_t>(m), CMp(prec));
    std::vector<CMp> ac;
    for (int j = 0; j < m; ++j) {
        pw[j] = roots[j];
        ac.emplace_back(Mp(prec, a[j].real()), Mp(prec, a[j].imag()));
    }
    for (long n = 1; n <= N; ++n) {
        CMp s(prec);
        for (int j = 0; j < m; ++j) s = cmp_add(s, cmp_mul(ac[j], pw[j]));
        double mag = std::max(1.0, cmp_abs(s).to_double());
        if (std::abs(s.im.to_double()) > 1e-20 * mag)
            fail(ErrorKind::InvalidArgument, "coefficients are not conjugate-symmetric: the sum is not real");
        long e = std::max<long>(1, mpfr_get_exp(s.re.get()));
        long need = e + 128;
        if (!w.is_exact() && w.prec() < need)
            fail(ErrorKind::PrecisionExhausted, "omega carries too few bits for the growth of theta_1^n");
        dioph_detail::tally(out, w.dist(s.re.with_prec(need)));
        for (int j = 0; j < m; ++j) pw[j] = cmp_mul(pw[j], roots[j]);
    }
    return out;
}

/// Same count with x_n = |zeta^n(v)|_s computed exactly from population vectors.
inline EKFrequency ek_frequency_tiling(const Substitution& z, const Word& v, const Roof& s, const Frequency& w, long N,
                                       double rho) {
    require(!v.empty(), "v must be nonempty");
    Hierarchy h(z);
    EKFrequency out;
    out.N = N;
    out.rho = rho;
    for (long n = 1; n <= N; ++n) {
        DD t = s.turns(w, h.pop(static_cast<int>(n), v));
        dioph_detail::tally(out, Frequency::dist_from_turns(t));
    }
    return out;
}

} // namespace subdyn
