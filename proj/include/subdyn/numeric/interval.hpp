#pragma once
/**
 * @file interval.hpp
 * @brief Outward-rounded real and rectangular complex intervals on MPFR.
 */

#include "subdyn/error.hpp"
#include "subdyn/numeric/mp.hpp"

#include <algorithm>

namespace subdyn {

class Interval {
public:
    explicit Interval(long prec = 128) : lo_(prec), hi_(prec) {}
    Interval(long prec, double x) : lo_(prec, x), hi_(prec, x) {}
    Interval(long prec, const BigInt& x) : lo_(prec, x, MPFR_RNDD), hi_(prec, x, MPFR_RNDU) {}
    Interval(long prec, const Rational& x) : lo_(prec, x, MPFR_RNDD), hi_(prec, x, MPFR_RNDU) {}
    Interval(const Mp& lo, const Mp& hi) : lo_(lo), hi_(hi) {}

    static Interval point(const Mp& x) { return Interval(x, x); }

    const Mp& lo() const { return lo_; }
    const Mp& hi() const { return hi_; }
    long prec() const { return lo_.prec(); }

    Mp mid() const {
        Mp r(prec() + 2);
        mpfr_add(r.get(), lo_.get(), hi_.get(), MPFR_RNDN);
        mpfr_div_2ui(r.get(), r.get(), 1, MPFR_RNDN);
        return r;
    }

    Mp width() const {
        Mp r(prec());
        mpfr_sub(r.get(), hi_.get(), lo_.get(), MPFR_RNDU);
        return r;
    }

    bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }
    bool contains(const Mp& x) const { return lo_ <= x && x <= hi_; }
    bool certainly_positive() const { return lo_.sign() > 0; }
    bool certainly_negative() const { return hi_.sign() < 0; }
    bool certainly_less(const Interval& o) const { return hi_ < o.lo_; }

    /// Upper bound on |x| over the interval.
    Mp mag() const {
        Mp a(prec()), b(prec());
        mpfr_abs(a.get(), lo_.get(), MPFR_RNDU);
        mpfr_abs(b.get(), hi_.get(), MPFR_RNDU);
        return a > b ? a : b;
    }

    /// Lower bound on |x| over the interval.
    Mp mig() const {
        if (contains_zero()) return Mp(prec());
        Mp a(prec()), b(prec());
        mpfr_abs(a.get(), lo_.get(), MPFR_RNDD);
        mpfr_abs(b.get(), hi_.get(), MPFR_RNDD);
        return a < b ? a : b;
    }

    Interval with_prec(long prec) const {
        return Interval(lo_.with_prec(prec, MPFR_RNDD), hi_.with_prec(prec, MPFR_RNDU));
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        long p = std::max(a.prec(), b.prec());
        Interval r(p);
        mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }

    friend Interval operator-(const Interval& a, const Interval& b) {
        long p = std::max(a.prec(), b.prec());
        Interval r(p);
        mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
        mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
        return r;
    }

    friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }

    friend Interval operator*(const Interval& a, const Interval& b) {
        long p = std::max(a.prec(), b.prec());
        Interval r(p);
        Mp t(p);
        bool first = true;
        const Mp* xs[2] = {&a.lo_, &a.hi_};
        const Mp* ys[2] = {&b.lo_, &b.hi_};
        for (auto* x : xs) {
            for (auto* y : ys) {
                mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDD);
                if (first || t < r.lo_) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
                mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDU);
                if (first || t > r.hi_) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
                first = false;
            }
        }
        return r;
    }

    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.contains_zero()) fail(ErrorKind::PrecisionExhausted, "interval division by an interval containing zero");
        long p = std::max(a.prec(), b.prec());
        Interval inv(p);
        mpfr_ui_div(inv.lo_.get(), 1, b.hi_.get(), MPFR_RNDD);
        mpfr_ui_div(inv.hi_.get(), 1, b.lo_.get(), MPFR_RNDU);
        return a * inv;
    }

    Interval sqr() const {
        Interval r(prec());
        Mp a = mig(), b = mag();
        mpfr_sqr(r.lo_.get(), a.get(), MPFR_RNDD);
        mpfr_sqr(r.hi_.get(), b.get(), MPFR_RNDU);
        return r;
    }

    Interval abs() const { return Interval(mig(), mag()); }

    Interval sqrt() const {
        Interval r(prec());
        Mp l = lo_;
        if (l.sign() < 0) mpfr_set_zero(l.get(), 1);
        mpfr_sqrt(r.lo_.get(), l.get(), MPFR_RNDD);
        mpfr_sqrt(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }

    Interval log() const {
        if (!certainly_positive()) fail(ErrorKind::PrecisionExhausted, "log of a non-positive interval");
        Interval r(prec());
        mpfr_log(r.lo_.get(), lo_.get(), MPFR_RNDD);
        mpfr_log(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }

    Interval exp() const {
        Interval r(prec());
        mpfr_exp(r.lo_.get(), lo_.get(), MPFR_RNDD);
        mpfr_exp(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }

    Interval pow(unsigned long e) const {
        Interval r(prec(), 1.0);
        Interval base = *this;
        while (e) {
            if (e & 1) r = r * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return r;
    }

    static Interval hull(const Interval& a, const Interval& b) {
        return Interval(a.lo_ < b.lo_ ? a.lo_ : b.lo_, a.hi_ > b.hi_ ? a.hi_ : b.hi_);
    }

    /// Widens symmetrically by r (rounded outward).
    Interval inflate(const Mp& r) const {
        Interval out(prec());
        mpfr_sub(out.lo_.get(), lo_.get(), r.get(), MPFR_RNDD);
        mpfr_add(out.hi_.get(), hi_.get(), r.get(), MPFR_RNDU);
        return out;
    }

private:
    Mp lo_, hi_;
};

struct ComplexInterval {
    Interval re, im;

    ComplexInterval(long prec = 128) : re(prec), im(prec) {}
    ComplexInterval(Interval r, Interval i) : re(std::move(r)), im(std::move(i)) {}

    long prec() const { return re.prec(); }

    friend ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend ComplexInterval operator*(const ComplexInterval& a, const Interval& b) {
        return {a.re * b, a.im * b};
    }

    /// Enclosure of |z|^2.
    Interval norm2() const { return re.sqr() + im.sqr(); }

    Mp abs_upper() const { return norm2().sqrt().hi(); }
    Mp abs_lower() const { return norm2().sqrt().lo(); }
};

} // namespace subdyn
