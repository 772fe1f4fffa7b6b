#pragma once
/**
 * @file algebraic.hpp
 * @brief Real algebraic integers: certified conjugates, PV/Salem classification,
 *        exact Z[theta] arithmetic and certified distances to the nearest integer.
 */

#include "subdyn/error.hpp"
#include "subdyn/numeric/interval.hpp"
#include "subdyn/numeric/mp.hpp"
#include "subdyn/numeric/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace subdyn {

/**
 * A real algebraic integer theta > 0 given by its minimal polynomial, taken as
 * the largest real root. Conjugates are ordered with theta first, then by
 * decreasing modulus, ties by decreasing imaginary part.
 */
class AlgebraicInteger {
public:
    static AlgebraicInteger from_poly(const IntPoly& p, long start_prec = 128) {
        require(p.degree() >= 1, "algebraic integer needs degree >= 1");
        require(p.is_monic(), "minimal polynomial must be monic: " + p.str());
        AlgebraicInteger a;
        a.poly_ = p;
        RootSet rs = certify_roots(p, start_prec);
        int best = -1;
        for (int k = 0; k < static_cast<int>(rs.roots.size()); ++k) {
            if (!rs.roots[k].real) continue;
            if (best < 0 || rs.roots[k].re > rs.roots[best].re) best = k;
        }
        if (best < 0) fail(ErrorKind::WrongClass, "polynomial " + p.str() + " has no real root");
        std::vector<RootBox> ordered;
        ordered.push_back(rs.roots[best]);
        std::vector<RootBox> rest;
        for (int k = 0; k < static_cast<int>(rs.roots.size()); ++k)
            if (k != best) rest.push_back(rs.roots[k]);
        std::stable_sort(rest.begin(), rest.end(), [](const RootBox& x, const RootBox& y) {
            double mx = x.modulus_double(), my = y.modulus_double();
            if (std::abs(mx - my) > 1e-12 * std::max(1.0, mx)) return mx > my;
            return x.im.to_double() > y.im.to_double();
        });
        for (auto& r : rest) ordered.push_back(r);
        a.roots_ = std::move(ordered);
        a.root_prec_ = rs.prec;
        a.cache_ = std::make_shared<Cache>();
        a.cache_->theta = a.roots_[0].real_interval();
        return a;
    }

    static AlgebraicInteger from_high_first(const std::vector<long long>& coeffs) {
        return from_poly(IntPoly::from_high_first(coeffs));
    }

    const IntPoly& poly() const { return poly_; }
    int degree() const { return poly_.degree(); }
    const std::vector<RootBox>& roots() const { return roots_; }

    double theta_double() const { return roots_[0].re.to_double(); }

    /// Certified enclosure of theta of width about 2^-bits * theta.
    Interval theta(long bits) const {
        std::lock_guard<std::mutex> lock(cache_->mu);
        Mp w = cache_->theta.width();
        Mp target(64);
        Mp th = cache_->theta.hi();
        long e = std::max<long>(0, mpfr_get_exp(th.get()));
        mpfr_set_ui_2exp(target.get(), 1, e - bits, MPFR_RNDN);
        if (w > target || cache_->theta.prec() < bits + 32)
            cache_->theta = refine_real_root(poly_, cache_->theta, bits + 32);
        return cache_->theta.with_prec(bits + 64);
    }

    /// Modulus enclosure of conjugate j (j = 0 is theta).
    Interval conjugate_modulus(int j) const { return roots_[static_cast<size_t>(j)].modulus(); }

private:
    struct Cache {
        std::mutex mu;
        Interval theta;
    };
    IntPoly poly_;
    std::vector<RootBox> roots_;
    long root_prec_ = 0;
    std::shared_ptr<Cache> cache_;
};

enum class PisotClass { PV, Salem, HasConjugateOutside, Degenerate };

inline const char* class_name(PisotClass c) {
    switch (c) {
        case PisotClass::PV: return "PV";
        case PisotClass::Salem: return "Salem";
        case PisotClass::HasConjugateOutside: return "HasConjugateOutside";
        case PisotClass::Degenerate: return "Degenerate";
    }
    return "?";
}

struct Classification {
    PisotClass cls = PisotClass::Degenerate;
    /// Conjugate index certifying the class (largest other modulus, or one on the circle).
    int witness = -1;
    double witness_modulus = 0.0;
};

inline Classification classify(const AlgebraicInteger& a) {
    Classification c;
    const auto& R = a.roots();
    Mp one(64, 1.0);
    if (!(R[0].real_interval().lo() > one)) {
        c.cls = PisotClass::Degenerate;
        return c;
    }
    int outside = -1, on = -1, largest = -1;
    for (int j = 1; j < static_cast<int>(R.size()); ++j) {
        if (largest < 0 || R[j].modulus_double() > R[largest].modulus_double()) largest = j;
        if (R[j].circle == RootBox::Circle::Outside && (outside < 0 || R[j].modulus_double() > R[outside].modulus_double()))
            outside = j;
        if (R[j].circle == RootBox::Circle::On && on < 0) on = j;
        if (R[j].circle == RootBox::Circle::Unknown)
            fail(ErrorKind::PrecisionExhausted, "conjugate position relative to the unit circle undecided");
    }
    if (outside >= 0) {
        c.cls = PisotClass::HasConjugateOutside;
        c.witness = outside;
    } else if (on >= 0) {
        c.cls = PisotClass::Salem;
        c.witness = on;
    } else {
        c.cls = PisotClass::PV;
        c.witness = largest;
    }
    if (c.witness >= 0) c.witness_modulus = R[c.witness].modulus_double();
    return c;
}

/// Element of Z[theta] in the power basis 1, theta, ..., theta^{s-1}.
struct ZTheta {
    std::vector<BigInt> c;

    static ZTheta one(int s) {
        ZTheta z;
        z.c.assign(static_cast<size_t>(s), BigInt(0));
        z.c[0] = 1;
        return z;
    }
    static ZTheta integer(int s, const BigInt& t) {
        ZTheta z = one(s);
        z.c[0] = t;
        return z;
    }

    long max_bits() const {
        long b = 0;
        for (const auto& x : c) b = std::max(b, bit_length(x));
        return b;
    }

    friend bool operator==(const ZTheta& a, const ZTheta& b) { return a.c == b.c; }
};

/// x * theta, reduced with theta^s = -sum_{i<s} a_i theta^i.
inline ZTheta zt_mul_theta(const ZTheta& x, const IntPoly& minpoly) {
    int s = minpoly.degree();
    require(static_cast<int>(x.c.size()) == s, "Z[theta] element has the wrong dimension");
    ZTheta y;
    y.c.assign(static_cast<size_t>(s), BigInt(0));
    for (int i = 0; i + 1 < s; ++i) y.c[i + 1] = x.c[i];
    const BigInt& top = x.c[s - 1];
    if (top != 0)
        for (int i = 0; i < s; ++i) y.c[i] -= top * minpoly.coeff(i);
    return y;
}

inline Interval zt_value(const ZTheta& x, const Interval& theta) {
    long p = theta.prec();
    Interval r(p, 0.0);
    for (size_t i = x.c.size(); i-- > 0;) r = r * theta + Interval(p, x.c[i]);
    return r;
}

struct FracDist {
    /// Signed remainder x - nearest, certified to lie in (-1/2, 1/2).
    Interval eps;
    BigInt nearest;
    double dist = 0.0;   ///< ||x|| to double precision.
    double err = 0.0;    ///< width of the enclosure of eps.
    long bits = 0;       ///< precision used.
};

namespace alg_detail {

inline bool split_nearest(const Interval& v, FracDist& out) {
    long p = v.prec();
    Mp half(p, 0.5);
    Mp lo_shift = v.lo() + half;
    Mp hi_shift = v.hi() + half;
    BigInt klo = mp_floor_int(lo_shift), khi = mp_floor_int(hi_shift);
    if (klo != khi) return false;
    Interval e = v - Interval(p, klo);
    Mp mhalf(p, -0.5);
    if (!(e.lo() > mhalf) || !(e.hi() < half)) return false;
    out.eps = e;
    out.nearest = klo;
    Mp a = e.mag(), b = e.mig();
    out.dist = Interval(b, a).mid().to_double();
    out.err = e.width().to_double();
    out.bits = p;
    return true;
}

} // namespace alg_detail

/**
 * Certified ||x|| for x in Z[theta]. Precision starts at the magnitude of x
 * plus 64 guard bits and doubles on ambiguity up to 2^20 bits.
 */
inline FracDist frac_dist(const ZTheta& x, const AlgebraicInteger& a, double target_err = 1e-30,
                          long max_bits = 1L << 20) {
    int s = a.degree();
    long mag = x.max_bits() + static_cast<long>(std::ceil((s - 1) * std::log2(std::max(2.0, a.theta_double()))));
    long tb = static_cast<long>(std::ceil(-std::log2(std::max(target_err, 1e-300))));
    long prec = mag + tb + 64;
    FracDist out;
    for (; prec <= max_bits; prec *= 2) {
        Interval th = a.theta(prec);
        Interval v = zt_value(x, th);
        if (alg_detail::split_nearest(v, out) && out.err <= target_err) return out;
    }
    fail(ErrorKind::PrecisionExhausted, "frac_dist could not separate the value from a half-integer");
}

/// Certified ||x|| for a real x given by a routine producing an enclosure at a requested precision.
template <class Enclose>
inline FracDist frac_dist_real(Enclose&& enclose, long start_prec, double target_err = 1e-30,
                               long max_bits = 1L << 20) {
    FracDist out;
    for (long prec = start_prec; prec <= max_bits; prec *= 2) {
        Interval v = enclose(prec);
        if (alg_detail::split_nearest(v, out) && out.err <= target_err) return out;
    }
    fail(ErrorKind::HalfIntegerAmbiguity, "value not separated from a half-integer within the precision cap");
}

struct PropAlgConstants {
    int s = 0;
    BigInt H;           ///< max |b_j| for q(x) = x^s - b_1 x^{s-1} - ... - b_s
    Rational delta1;    ///< 1 / (1 + s H)
    long beta = 0;      ///< 1 + ceil(s log theta / log |theta_2|)
    double alpha = 0.0; ///< delta1^2 / log beta
    int theta2_index = -1;
    double theta2_modulus = 0.0;
};

inline PropAlgConstants prop_alg_constants(const AlgebraicInteger& a) {
    Classification c = classify(a);
    if (c.cls != PisotClass::HasConjugateOutside)
        fail(ErrorKind::WrongClass, std::string("needs a conjugate outside the unit circle, got ") + class_name(c.cls));
    PropAlgConstants k;
    k.s = a.degree();
    BigInt h = 0;
    for (int i = 0; i < k.s; ++i) h = std::max(h, BigInt(abs(a.poly().coeff(i))));
    k.H = h;
    k.delta1 = Rational(1, BigInt(1 + k.s * k.H));
    k.theta2_index = c.witness;
    k.theta2_modulus = c.witness_modulus;
    // The ratio is irrational unless the enclosure straddles an integer.
    long prec = 256;
    Interval lt = a.theta(prec).log();
    Interval l2 = a.conjugate_modulus(c.witness).log();
    Interval ratio = Interval(prec, static_cast<double>(k.s)) * lt / l2;
    BigInt clo = mp_floor_int(ratio.lo()), chi = mp_floor_int(ratio.hi());
    if (clo != chi) fail(ErrorKind::PrecisionExhausted, "s log theta / log|theta_2| too close to an integer");
    BigInt ceil_v = clo + 1;
    k.beta = 1 + ceil_v.get_si();
    double d = k.delta1.get_d();
    k.alpha = d * d / std::log(static_cast<double>(k.beta));
    return k;
}

/**
 * Lower bound on |Q(theta_j2)| over integer polynomials Q of degree < s with
 * coefficients bounded by @p height and Q(theta_j2) != 0:
 *   prod_{|theta_j| != 1, j != j2} ||theta_j| - 1|
 *     / (s^{s-2} (prod_{|theta_j| > 1, j != j2} |theta_j|)^s height^s).
 * @p j2 indexes roots() (theta is 0). Conjugates on the unit circle are skipped.
 */
inline double garsia_lower_bound(const AlgebraicInteger& a, int j2, const BigInt& height, int q_degree) {
    int s = a.degree();
    require(j2 >= 0 && j2 < s, "garsia_lower_bound: conjugate index out of range");
    require(height >= 1, "garsia_lower_bound: height must be >= 1");
    require(q_degree >= 0 && q_degree < s, "garsia_lower_bound: Q must have degree < s");
    long prec = 256;
    Interval num(prec, 1.0), big(prec, 1.0);
    Interval one(prec, 1.0);
    for (int j = 0; j < s; ++j) {
        if (j == j2) continue;
        const RootBox& r = a.roots()[j];
        if (r.circle == RootBox::Circle::On) continue;
        Interval m = a.conjugate_modulus(j);
        if (r.circle == RootBox::Circle::Unknown) fail(ErrorKind::PrecisionExhausted, "conjugate modulus undecided");
        num = num * (m - one).abs();
        if (r.circle == RootBox::Circle::Outside) big = big * m;
    }
    Interval den = big.pow(static_cast<unsigned long>(s)) * Interval(prec, height).pow(static_cast<unsigned long>(s));
    if (s >= 2) den = den * Interval(prec, static_cast<double>(s)).pow(static_cast<unsigned long>(s - 2));
    else den = den / Interval(prec, static_cast<double>(s));
    Interval q = num / den;
    return q.lo().to_double(MPFR_RNDD);
}

/**
 * Irreducible factor of the monic polynomial @p p that vanishes at its largest
 * real root. Candidates are products over root subsets containing that root,
 * rounded to integers and accepted only when they divide p exactly.
 */
inline IntPoly largest_root_minimal_polynomial(const IntPoly& p) {
    require(p.is_monic() && p.degree() >= 1, "need a monic polynomial of degree >= 1");
    IntPoly q = squarefree_part(p);
    RootSet rs = certify_roots(q);
    int n = static_cast<int>(rs.roots.size());
    int top = -1;
    for (int k = 0; k < n; ++k)
        if (rs.roots[k].real && (top < 0 || rs.roots[k].re > rs.roots[top].re)) top = k;
    if (top < 0) fail(ErrorKind::WrongClass, "polynomial " + p.str() + " has no real root");
    using C = std::complex<long double>;
    std::vector<C> z;
    for (int k = 0; k < n; ++k)
        if (k != top) z.emplace_back(rs.roots[k].re.to_double(), rs.roots[k].im.to_double());
    C zt(rs.roots[top].re.to_double(), 0.0L);
    auto rq = poly_detail::to_rat(q);
    for (int d = 1; d <= n; ++d) {
        // Subsets of size d - 1 of the other roots, in lexicographic order.
        std::vector<int> idx(static_cast<size_t>(d - 1));
        for (int i = 0; i < d - 1; ++i) idx[i] = i;
        for (;;) {
            std::vector<C> c{C(1.0L)};
            auto mul = [&](C r) {
                std::vector<C> nc(c.size() + 1, C(0.0L));
                for (size_t i = 0; i < c.size(); ++i) {
                    nc[i + 1] += c[i];
                    nc[i] -= r * c[i];
                }
                c = std::move(nc);
            };
            mul(zt);
            for (int i : idx) mul(z[i]);
            std::vector<BigInt> ic;
            bool ok = true;
            for (const auto& x : c) {
                long double r = std::round(x.real());
                if (std::abs(x.imag()) > 1e-6L || std::abs(x.real() - r) > 1e-6L * std::max(1.0L, std::abs(r))) {
                    ok = false;
                    break;
                }
                ic.emplace_back(static_cast<long>(r));
            }
            if (ok) {
                IntPoly cand(ic);
                if (poly_detail::is_zero(poly_detail::rem(rq, poly_detail::to_rat(cand)))) return cand;
            }
            int i = d - 2;
            while (i >= 0 && idx[i] == static_cast<int>(z.size()) - (d - 1) + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < d - 1; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    fail(ErrorKind::PrecisionExhausted, "no integer factor found for " + p.str());
}

} // namespace subdyn
