#pragma once
/**
 * @file double_double.hpp
 * @brief Double-double reals and complexes, with sine/cosine of an angle in turns.
 */

#include "subdyn/numeric/mp.hpp"

#include <array>
#include <cmath>
#include <complex>

namespace subdyn {

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    double to_double() const { return hi + lo; }
};

namespace dd_detail {

inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace dd_detail

inline DD operator+(DD a, DD b) {
    DD s = dd_detail::two_sum(a.hi, b.hi);
    DD t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
    DD p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DD operator/(DD a, DD b) {
    double q1 = a.hi / b.hi;
    DD r = a - b * DD(q1);
    double q2 = r.hi / b.hi;
    r = r - b * DD(q2);
    double q3 = r.hi / b.hi;
    DD q = dd_detail::quick_two_sum(q1, q2);
    return q + DD(q3);
}

inline DD& operator+=(DD& a, DD b) { return a = a + b; }
inline DD& operator-=(DD& a, DD b) { return a = a - b; }
inline DD& operator*=(DD& a, DD b) { return a = a * b; }

inline DD dd_abs(DD a) { return a.hi < 0 || (a.hi == 0 && a.lo < 0) ? -a : a; }
inline DD dd_ldexp(DD a, int e) { return {std::ldexp(a.hi, e), std::ldexp(a.lo, e)}; }

inline DD dd_from_mp(const Mp& x) {
    double h = x.to_double();
    Mp r(x.prec() + 64);
    mpfr_sub_d(r.get(), x.get(), h, MPFR_RNDN);
    return dd_detail::quick_two_sum(h, r.to_double());
}

inline DD dd_from_rational(const Rational& q) {
    Mp x(160, q);
    return dd_from_mp(x);
}

inline DD dd_sqrt(DD a) {
    if (a.hi <= 0) return DD(0.0);
    double x = std::sqrt(a.hi);
    DD xx = dd_detail::two_prod(x, x);
    double corr = ((a.hi - xx.hi) - xx.lo + a.lo) / (2.0 * x);
    return dd_detail::quick_two_sum(x, corr);
}

namespace dd_detail {

struct TrigTables {
    DD two_pi;
    DD inv_fact[32];
    DD half_sqrt2;

    TrigTables() {
        Mp pi = mp_pi(256);
        Mp tp(256);
        mpfr_mul_ui(tp.get(), pi.get(), 2, MPFR_RNDN);
        two_pi = dd_from_mp(tp);
        Mp f(256, 1.0);
        for (int k = 0; k < 32; ++k) {
            if (k > 0) mpfr_mul_ui(f.get(), f.get(), static_cast<unsigned long>(k), MPFR_RNDN);
            Mp inv(256);
            mpfr_ui_div(inv.get(), 1, f.get(), MPFR_RNDN);
            inv_fact[k] = dd_from_mp(inv);
        }
        Mp h(256, 2.0);
        mpfr_sqrt(h.get(), h.get(), MPFR_RNDN);
        mpfr_div_2ui(h.get(), h.get(), 1, MPFR_RNDN);
        half_sqrt2 = dd_from_mp(h);
    }
};

inline const TrigTables& trig_tables() {
    static const TrigTables t;
    return t;
}

} // namespace dd_detail

/// cos(2 pi x) and sin(2 pi x); exact at multiples of 1/8 turn.
inline void sincos_turns(DD x, DD& c, DD& s) {
    const auto& T = dd_detail::trig_tables();
    double k = std::nearbyint(x.hi * 8.0);
    DD r = x - DD(k / 8.0);
    long oct = static_cast<long>(std::fmod(k, 8.0));
    if (oct < 0) oct += 8;
    DD y = r * T.two_pi;
    DD y2 = y * y;
    // Taylor series on |y| <= pi/8.
    DD sn(0.0), cs(0.0);
    DD term = y;
    for (int n = 1; n < 30; n += 2) {
        DD t = term * T.inv_fact[n];
        sn += (n / 2) % 2 == 0 ? t : -t;
        term *= y2;
    }
    term = DD(1.0);
    for (int n = 0; n < 30; n += 2) {
        DD t = term * T.inv_fact[n];
        cs += (n / 2) % 2 == 0 ? t : -t;
        term *= y2;
    }
    if (r.hi == 0.0 && r.lo == 0.0) {
        sn = DD(0.0);
        cs = DD(1.0);
    }
    const DD h = T.half_sqrt2;
    DD co, so;
    switch (oct) {
        case 0: co = DD(1.0); so = DD(0.0); break;
        case 1: co = h; so = h; break;
        case 2: co = DD(0.0); so = DD(1.0); break;
        case 3: co = -h; so = h; break;
        case 4: co = DD(-1.0); so = DD(0.0); break;
        case 5: co = -h; so = -h; break;
        case 6: co = DD(0.0); so = DD(-1.0); break;
        default: co = h; so = -h; break;
    }
    if (oct % 2 == 0) {
        // Avoid multiplying by exact zeros and ones through the DD path.
        c = co.hi == 0.0 ? (so.hi > 0 ? -sn : sn) : (co.hi > 0 ? cs : -cs);
        s = so.hi == 0.0 ? (co.hi > 0 ? sn : -sn) : (so.hi > 0 ? cs : -cs);
    } else {
        c = co * cs - so * sn;
        s = so * cs + co * sn;
    }
}

struct CDD {
    DD re, im;

    CDD() = default;
    CDD(DD r) : re(r), im(0.0) {}
    CDD(DD r, DD i) : re(r), im(i) {}

    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
    DD norm2() const { return re * re + im * im; }
    double abs() const { return std::sqrt(norm2().to_double()); }
    CDD conj() const { return {re, -im}; }
};

inline CDD operator+(const CDD& a, const CDD& b) { return {a.re + b.re, a.im + b.im}; }
inline CDD operator-(const CDD& a, const CDD& b) { return {a.re - b.re, a.im - b.im}; }
inline CDD operator*(const CDD& a, const CDD& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CDD operator*(const CDD& a, DD b) { return {a.re * b, a.im * b}; }
inline CDD& operator+=(CDD& a, const CDD& b) { return a = a + b; }
inline CDD cdd_ldexp(const CDD& a, int e) { return {dd_ldexp(a.re, e), dd_ldexp(a.im, e)}; }

/// exp(-2 pi i x) for x in turns.
inline CDD cis_neg_turns(DD x) {
    DD c, s;
    sincos_turns(x, c, s);
    return {c, -s};
}

} // namespace subdyn
