#pragma once
/**
 * @file polynomial.hpp
 * @brief Integer polynomials, characteristic polynomials and certified root isolation.
 *
 * Roots are isolated by Aberth iteration at a working precision and certified
 * by the Braess-Hadeler inclusion discs D(z_k, n |p(z_k)| / (|a_n| prod |z_k - z_j|)):
 * pairwise disjoint discs contain exactly one root each.
 */

#include "subdyn/error.hpp"
#include "subdyn/numeric/interval.hpp"
#include "subdyn/numeric/matrix.hpp"
#include "subdyn/numeric/mp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace subdyn {

class IntPoly {
public:
    IntPoly() = default;
    explicit IntPoly(std::vector<BigInt> low_first) : c_(std::move(low_first)) { trim(); }

    static IntPoly from_high_first(const std::vector<BigInt>& high) {
        std::vector<BigInt> low(high.rbegin(), high.rend());
        return IntPoly(low);
    }
    static IntPoly from_high_first(const std::vector<long long>& high) {
        std::vector<BigInt> h;
        for (auto x : high) h.emplace_back(static_cast<long>(x));
        return from_high_first(h);
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const BigInt& coeff(int i) const { return c_[static_cast<size_t>(i)]; }
    const std::vector<BigInt>& coeffs() const { return c_; }
    const BigInt& lead() const { return c_.back(); }
    bool is_monic() const { return !c_.empty() && lead() == 1; }

    std::vector<BigInt> high_first() const { return {c_.rbegin(), c_.rend()}; }

    BigInt height() const {
        BigInt h = 0;
        for (const auto& x : c_)
            if (abs(x) > h) h = abs(x);
        return h;
    }

    IntPoly derivative() const {
        std::vector<BigInt> d;
        for (size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<unsigned long>(i));
        if (d.empty()) d.push_back(0);
        return IntPoly(d);
    }

    BigInt eval(const BigInt& x) const {
        BigInt r = 0;
        for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    Interval eval(const Interval& x) const {
        Interval r(x.prec(), 0.0);
        for (size_t i = c_.size(); i-- > 0;) r = r * x + Interval(x.prec(), c_[i]);
        return r;
    }

    ComplexInterval eval(const ComplexInterval& z) const {
        long p = z.prec();
        ComplexInterval r{Interval(p, 0.0), Interval(p, 0.0)};
        for (size_t i = c_.size(); i-- > 0;) {
            r = r * z;
            r.re = r.re + Interval(p, c_[i]);
        }
        return r;
    }

    /// x^n p(1/x) = +-p(x): roots are closed under z -> 1/z.
    bool is_self_reciprocal() const {
        int n = degree();
        bool plus = true, minus = true;
        for (int i = 0; i <= n; ++i) {
            if (c_[i] != c_[n - i]) plus = false;
            if (c_[i] != -c_[n - i]) minus = false;
        }
        return plus || minus;
    }

    /// Exact division by (x - r) for an integer root r.
    IntPoly deflate(const BigInt& r) const {
        int n = degree();
        std::vector<BigInt> q(static_cast<size_t>(n));
        BigInt carry = 0;
        for (int i = n; i >= 1; --i) {
            carry = c_[i] + carry * r;
            q[i - 1] = carry;
        }
        return IntPoly(q);
    }

    std::string str() const {
        std::string s;
        for (int i = degree(); i >= 0; --i) {
            if (c_[i] == 0) continue;
            if (!s.empty()) s += c_[i] > 0 ? " + " : " - ";
            else if (c_[i] < 0) s += "-";
            BigInt a = abs(c_[i]);
            if (a != 1 || i == 0) s += a.get_str();
            if (i >= 1) s += "x";
            if (i >= 2) s += "^" + std::to_string(i);
        }
        return s.empty() ? "0" : s;
    }

    friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }

private:
    void trim() {
        while (c_.size() > 1 && c_.back() == 0) c_.pop_back();
        if (c_.empty()) c_.push_back(0);
    }
    std::vector<BigInt> c_;
};

namespace poly_detail {

using RatPoly = std::vector<Rational>;

inline void trim(RatPoly& p) {
    while (p.size() > 1 && p.back() == 0) p.pop_back();
}

inline RatPoly rem(RatPoly a, const RatPoly& b) {
    trim(a);
    int db = static_cast<int>(b.size()) - 1;
    while (static_cast<int>(a.size()) - 1 >= db && !(a.size() == 1 && a[0] == 0)) {
        int da = static_cast<int>(a.size()) - 1;
        Rational f = a.back() / b.back();
        for (int i = 0; i <= db; ++i) a[da - db + i] -= f * b[i];
        a.pop_back();
        if (a.empty()) a.push_back(0);
        trim(a);
    }
    return a;
}

inline RatPoly quot(RatPoly a, const RatPoly& b) {
    trim(a);
    int db = static_cast<int>(b.size()) - 1;
    int da = static_cast<int>(a.size()) - 1;
    if (da < db) return {Rational(0)};
    RatPoly q(static_cast<size_t>(da - db + 1), Rational(0));
    for (int k = da - db; k >= 0; --k) {
        Rational f = a[k + db] / b.back();
        q[k] = f;
        for (int i = 0; i <= db; ++i) a[k + i] -= f * b[i];
    }
    return q;
}

inline bool is_zero(const RatPoly& p) { return p.size() == 1 && p[0] == 0; }

inline RatPoly gcd(RatPoly a, RatPoly b) {
    trim(a);
    trim(b);
    while (!is_zero(b)) {
        RatPoly r = rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    Rational l = a.back();
    for (auto& x : a) x /= l;
    return a;
}

inline RatPoly to_rat(const IntPoly& p) {
    RatPoly r;
    for (const auto& x : p.coeffs()) r.emplace_back(x);
    return r;
}

inline IntPoly to_int_primitive(const RatPoly& p) {
    BigInt den = 1;
    for (const auto& x : p) den = lcm(den, BigInt(x.get_den()));
    std::vector<BigInt> c;
    for (const auto& x : p) c.push_back(BigInt(x.get_num() * (den / x.get_den())));
    BigInt g = 0;
    for (const auto& x : c) g = gcd(g, x);
    if (g != 0)
        for (auto& x : c) x /= g;
    if (c.back() < 0)
        for (auto& x : c) x = -x;
    return IntPoly(c);
}

} // namespace poly_detail

inline bool is_squarefree(const IntPoly& p) {
    if (p.degree() <= 0) return true;
    auto g = poly_detail::gcd(poly_detail::to_rat(p), poly_detail::to_rat(p.derivative()));
    return g.size() == 1;
}

/// p / gcd(p, p'), primitive with positive leading coefficient.
inline IntPoly squarefree_part(const IntPoly& p) {
    if (p.degree() <= 0) return p;
    auto rp = poly_detail::to_rat(p);
    auto g = poly_detail::gcd(rp, poly_detail::to_rat(p.derivative()));
    return poly_detail::to_int_primitive(poly_detail::quot(rp, g));
}

/// det(xI - A) by Faddeev-LeVerrier; the divisions are exact.
inline IntPoly charpoly(const BigMatrix& A) {
    int n = A.rows();
    require(n == A.cols() && n > 0, "charpoly needs a nonempty square matrix");
    std::vector<BigInt> c(static_cast<size_t>(n + 1), BigInt(0));
    c[n] = 1;
    BigMatrix M(n, n);
    for (int k = 1; k <= n; ++k) {
        BigMatrix AM = A * M;
        for (int i = 0; i < n; ++i) AM(i, i) += c[n - k + 1];
        M = AM;
        BigMatrix AMk = A * M;
        BigInt t = -AMk.trace();
        c[n - k] = t / k;
    }
    return IntPoly(c);
}

struct CMp {
    Mp re, im;
    explicit CMp(long prec = 128) : re(prec), im(prec) {}
    CMp(Mp r, Mp i) : re(std::move(r)), im(std::move(i)) {}
    long prec() const { return re.prec(); }
};

inline CMp cmp_add(const CMp& a, const CMp& b) { return {a.re + b.re, a.im + b.im}; }
inline CMp cmp_sub(const CMp& a, const CMp& b) { return {a.re - b.re, a.im - b.im}; }
inline CMp cmp_mul(const CMp& a, const CMp& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CMp cmp_div(const CMp& a, const CMp& b) {
    Mp d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline Mp cmp_abs(const CMp& a) {
    Mp r(a.prec());
    mpfr_hypot(r.get(), a.re.get(), a.im.get(), MPFR_RNDN);
    return r;
}

/// One certified root: the disc D(center, radius) holds exactly this root.
struct RootBox {
    Mp re, im, radius;
    bool real = false;
    enum class Circle { Unknown, Inside, On, Outside } circle = Circle::Unknown;

    /// Certified enclosure of |z|.
    Interval modulus() const {
        if (circle == Circle::On) return Interval(re.prec(), 1.0);
        long p = re.prec();
        Interval zr = Interval::point(re), zi = Interval::point(im);
        Interval m = (zr.sqr() + zi.sqr()).sqrt();
        Mp lo(p), hi(p);
        mpfr_sub(lo.get(), m.lo().get(), radius.get(), MPFR_RNDD);
        if (lo.sign() < 0) mpfr_set_zero(lo.get(), 1);
        mpfr_add(hi.get(), m.hi().get(), radius.get(), MPFR_RNDU);
        return Interval(lo, hi);
    }

    Interval real_interval() const {
        return Interval::point(re).inflate(radius);
    }

    double modulus_double() const { return circle == Circle::On ? 1.0 : std::hypot(re.to_double(), im.to_double()); }
};

struct RootSet {
    IntPoly poly;
    long prec = 0;
    std::vector<RootBox> roots;
};

namespace poly_detail {

inline CMp eval_cmp(const IntPoly& p, const CMp& z) {
    long prec = z.prec();
    CMp r(prec);
    for (int i = p.degree(); i >= 0; --i) {
        r = cmp_mul(r, z);
        r.re = r.re + Mp(prec, p.coeff(i));
    }
    return r;
}

inline void aberth(const IntPoly& p, std::vector<CMp>& z, long prec, int max_iter) {
    int n = p.degree();
    IntPoly dp = p.derivative();
    Mp tol(prec);
    mpfr_set_ui_2exp(tol.get(), 1, -(prec - 8), MPFR_RNDN);
    for (int it = 0; it < max_iter; ++it) {
        Mp maxcorr(prec);
        for (int k = 0; k < n; ++k) {
            CMp pv = eval_cmp(p, z[k]);
            CMp dv = eval_cmp(dp, z[k]);
            if (pv.re.is_zero() && pv.im.is_zero()) continue;
            CMp w = cmp_div(pv, dv);
            CMp s(prec);
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                CMp one{Mp(prec, 1.0), Mp(prec)};
                s = cmp_add(s, cmp_div(one, cmp_sub(z[k], z[j])));
            }
            CMp one{Mp(prec, 1.0), Mp(prec)};
            CMp corr = cmp_div(w, cmp_sub(one, cmp_mul(w, s)));
            z[k] = cmp_sub(z[k], corr);
            Mp a = cmp_abs(corr);
            Mp scale = cmp_abs(z[k]);
            if (scale < Mp(prec, 1.0)) scale = Mp(prec, 1.0);
            Mp rel = a / scale;
            if (rel > maxcorr) maxcorr = rel;
        }
        if (maxcorr < tol) return;
    }
}

inline ComplexInterval point_ci(const CMp& z) {
    return {Interval::point(z.re), Interval::point(z.im)};
}

/// Discs D(c1,r1), D(c2,r2) certainly disjoint.
inline bool disjoint(const Mp& x1, const Mp& y1, const Mp& r1, const Mp& x2, const Mp& y2, const Mp& r2) {
    long p = x1.prec();
    Interval dx = Interval::point(x1) - Interval::point(x2);
    Interval dy = Interval::point(y1) - Interval::point(y2);
    Interval d = (dx.sqr() + dy.sqr()).sqrt();
    Mp rs(p);
    mpfr_add(rs.get(), r1.get(), r2.get(), MPFR_RNDU);
    return d.lo() > rs;
}

} // namespace poly_detail

/**
 * Isolates all complex roots of a squarefree integer polynomial in pairwise
 * disjoint certified discs, resolving for each root whether it is real and
 * where it sits relative to the unit circle. Precision doubles from
 * @p start_prec until everything is decided or @p max_prec is passed.
 */
inline RootSet certify_roots(const IntPoly& p, long start_prec = 128, long max_prec = 1L << 20) {
    int n = p.degree();
    require(n >= 1, "certify_roots needs degree >= 1");
    if (!is_squarefree(p)) fail(ErrorKind::NotSquarefree, "polynomial " + p.str() + " has a repeated root");

    RootSet out;
    out.poly = p;
    std::vector<CMp> z;
    {
        // Cauchy bound for the starting circle.
        double R = 1.0;
        double ln = std::abs(p.lead().get_d());
        for (int i = 0; i < n; ++i) R = std::max(R, 1.0 + std::abs(p.coeff(i).get_d()) / ln);
        for (int k = 0; k < n; ++k) {
            double ang = 2.0 * M_PI * k / n + 0.4;
            z.emplace_back(Mp(start_prec, R * std::cos(ang)), Mp(start_prec, R * std::sin(ang)));
        }
    }
    bool reciprocal = p.is_self_reciprocal();
    for (long prec = start_prec; prec <= max_prec; prec *= 2) {
        for (auto& w : z) w = CMp(w.re.with_prec(prec), w.im.with_prec(prec));
        poly_detail::aberth(p, z, prec, prec <= start_prec ? 2000 : 200);

        std::vector<RootBox> boxes(static_cast<size_t>(n));
        bool ok = true;
        Mp lead_abs(prec, BigInt(abs(p.lead())));
        for (int k = 0; k < n && ok; ++k) {
            ComplexInterval zk = poly_detail::point_ci(z[k]);
            Mp num = p.eval(zk).abs_upper();
            Interval den(prec, 1.0);
            den = den * Interval::point(lead_abs);
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                ComplexInterval d = zk - poly_detail::point_ci(z[j]);
                Mp lo = d.abs_lower();
                if (lo.sign() <= 0) { ok = false; break; }
                den = den * Interval::point(lo);
            }
            if (!ok) break;
            Mp r(prec);
            mpfr_mul_ui(r.get(), num.get(), static_cast<unsigned long>(n), MPFR_RNDU);
            mpfr_div(r.get(), r.get(), den.lo().get(), MPFR_RNDU);
            boxes[k].re = z[k].re;
            boxes[k].im = z[k].im;
            boxes[k].radius = r;
        }
        if (!ok) continue;
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n && ok; ++j)
                ok = poly_detail::disjoint(boxes[i].re, boxes[i].im, boxes[i].radius, boxes[j].re, boxes[j].im,
                                           boxes[j].radius);
        if (!ok) continue;

        // Real roots: the mirrored disc meets no other disc.
        for (int k = 0; k < n && ok; ++k) {
            Mp absim = mp_abs(boxes[k].im);
            if (absim > boxes[k].radius) continue;
            Mp negim = -boxes[k].im;
            bool alone = true;
            for (int j = 0; j < n && alone; ++j)
                if (j != k && !poly_detail::disjoint(boxes[k].re, negim, boxes[k].radius, boxes[j].re, boxes[j].im,
                                                     boxes[j].radius))
                    alone = false;
            if (!alone) { ok = false; break; }
            // The root lies on the real chord of the disc.
            boxes[k].real = true;
            boxes[k].im = Mp(prec);
        }
        if (!ok) continue;

        // Position relative to the unit circle.
        for (int k = 0; k < n && ok; ++k) {
            RootBox& b = boxes[k];
            Interval m = b.modulus();
            Mp one(prec, 1.0);
            if (m.hi() < one) { b.circle = RootBox::Circle::Inside; continue; }
            if (m.lo() > one) { b.circle = RootBox::Circle::Outside; continue; }
            if (b.real) {
                BigInt cand = mp_floor_int(b.re + Mp(prec, 0.5));
                if ((cand == 1 || cand == -1) && p.eval(cand) == 0 && m.contains(one)) {
                    b.circle = RootBox::Circle::On;
                    continue;
                }
            }
            if (!reciprocal) { ok = false; break; }
            // Inversion z -> 1/conj(z) maps D(c,r) to D(c/(|c|^2-r^2), r/(|c|^2-r^2)).
            Interval cr = Interval::point(b.re), ci = Interval::point(b.im);
            Interval c2 = cr.sqr() + ci.sqr();
            Interval den = c2 - Interval::point(b.radius).sqr();
            if (!den.certainly_positive()) { ok = false; break; }
            Interval ir = cr / den, ii = ci / den;
            Interval rr = Interval::point(b.radius) / den;
            Mp irad(prec);
            Mp wre = ir.width(), wim = ii.width();
            mpfr_add(irad.get(), rr.hi().get(), wre.get(), MPFR_RNDU);
            mpfr_add(irad.get(), irad.get(), wim.get(), MPFR_RNDU);
            Mp imr = ir.mid(), imi = ii.mid();
            bool alone = true;
            for (int j = 0; j < n && alone; ++j)
                if (j != k && !poly_detail::disjoint(imr, imi, irad, boxes[j].re, boxes[j].im, boxes[j].radius))
                    alone = false;
            if (!alone) { ok = false; break; }
            b.circle = RootBox::Circle::On;
        }
        if (!ok) continue;

        out.prec = prec;
        out.roots = std::move(boxes);
        return out;
    }
    fail(ErrorKind::PrecisionExhausted, "could not certify the roots of " + p.str() + " below " +
                                            std::to_string(max_prec) + " bits");
}

/**
 * Shrinks the isolating interval of a simple real root to width at most
 * 2^-bits * max(1, |root|) by Newton steps, then certifies the bracket by a
 * sign change; falls back to bisection.
 */
inline Interval refine_real_root(const IntPoly& p, const Interval& iso, long bits) {
    long prec = bits + 64;
    Interval I = iso.with_prec(prec);
    IntPoly dp = p.derivative();
    auto sign_at = [&](const Mp& x) {
        Interval v = p.eval(Interval::point(x));
        if (v.certainly_positive()) return 1;
        if (v.certainly_negative()) return -1;
        return 0;
    };
    int slo = sign_at(I.lo()), shi = sign_at(I.hi());
    if (slo == 0 || shi == 0 || slo == shi) {
        // Endpoints too close to the root: bisect inward is impossible, so
        // rely on the disc certificate for the enclosure.
        return I;
    }
    Mp x = I.mid();
    for (int it = 0; it < 200; ++it) {
        Mp fx(prec), dfx(prec);
        {
            Mp r(prec);
            for (int i = p.degree(); i >= 0; --i) {
                mpfr_mul(r.get(), r.get(), x.get(), MPFR_RNDN);
                Mp c(prec, p.coeff(i));
                mpfr_add(r.get(), r.get(), c.get(), MPFR_RNDN);
            }
            fx = r;
            Mp d(prec);
            for (int i = dp.degree(); i >= 0; --i) {
                mpfr_mul(d.get(), d.get(), x.get(), MPFR_RNDN);
                Mp c(prec, dp.coeff(i));
                mpfr_add(d.get(), d.get(), c.get(), MPFR_RNDN);
            }
            dfx = d;
        }
        if (dfx.is_zero()) break;
        Mp step = fx / dfx;
        x = x - step;
        if (!(I.lo() <= x && x <= I.hi())) {
            x = I.mid();
            break;
        }
        Mp as = mp_abs(step);
        if (as.is_zero() || mpfr_get_exp(as.get()) < -(bits + 16)) break;
    }
    Mp w(prec);
    Mp ax = mp_abs(x);
    long e = ax.is_zero() ? 0 : std::max<long>(0, mpfr_get_exp(ax.get()));
    mpfr_set_ui_2exp(w.get(), 1, e - bits - 1, MPFR_RNDN);
    Mp a = x - w, b = x + w;
    if (I.contains(a) && I.contains(b)) {
        int sa = sign_at(a), sb = sign_at(b);
        if (sa != 0 && sb != 0 && sa != sb) return Interval(a, b);
    }
    // Bisection fallback.
    Mp lo = I.lo(), hi = I.hi();
    Mp target(prec);
    mpfr_set_ui_2exp(target.get(), 1, e - bits, MPFR_RNDN);
    for (int it = 0; it < 4 * (bits + 64); ++it) {
        if (hi - lo < target) break;
        Mp mid = Interval(lo, hi).mid();
        int sm = sign_at(mid);
        if (sm == 0) break;
        if (sm == slo) lo = mid;
        else hi = mid;
    }
    return Interval(lo, hi);
}

} // namespace subdyn
