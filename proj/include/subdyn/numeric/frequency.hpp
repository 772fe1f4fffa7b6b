#pragma once
/**
 * @file frequency.hpp
 * @brief Spectral parameter omega: an exact rational or a real known to a fixed precision.
 *
 * Phases are always reduced mod 1 before any trigonometry, so lengths in the
 * billions of digits cost nothing beyond big-integer arithmetic when omega is
 * rational.
 */

#include "subdyn/error.hpp"
#include "subdyn/numeric/double_double.hpp"
#include "subdyn/numeric/mp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>

namespace subdyn {

class Frequency {
public:
    Frequency() : q_(0) {}
    explicit Frequency(const Rational& q) : q_(q) { q_->canonicalize(); }
    static Frequency from_double(double x) { return Frequency(Rational(x)); }
    static Frequency from_real(const Mp& x) {
        Frequency f;
        f.q_.reset();
        f.r_ = x;
        return f;
    }

    /**
     * Parses "p/q", a decimal ("0.3" is exactly 3/10), or a sum/difference of
     * such terms and "sqrt(k)". Any sqrt makes the value real at @p prec bits.
     */
    static Frequency parse(const std::string& text, long prec = 512);

    bool is_exact() const { return q_.has_value(); }
    const Rational& rational() const { return *q_; }
    bool is_zero() const { return q_ ? *q_ == 0 : r_->is_zero(); }
    long prec() const { return q_ ? 0 : r_->prec(); }

    double to_double() const { return q_ ? q_->get_d() : r_->to_double(); }

    Mp to_mp(long prec) const {
        if (q_) return Mp(prec, *q_);
        return r_->with_prec(prec);
    }

    /// frac(omega * L) in [0,1).
    DD turns(const BigInt& L) const {
        if (q_) {
            BigInt num = q_->get_num() * L;
            BigInt r = floor_mod(num, q_->get_den());
            return dd_from_rational(Rational(r, q_->get_den()));
        }
        long need = bit_length(L) + 120;
        if (r_->prec() < need)
            fail(ErrorKind::PrecisionExhausted, "omega precision " + std::to_string(r_->prec()) +
                                                    " bits is below the " + std::to_string(need) +
                                                    " bits needed for this length");
        Mp p(r_->prec());
        Mp Lm(r_->prec() + 64, L);
        mpfr_mul(p.get(), r_->get(), Lm.get(), MPFR_RNDN);
        return dd_from_mp(mp_frac(p));
    }

    /// frac(omega * X) for an exact rational length.
    DD turns(const Rational& X) const {
        if (q_) {
            Rational v = *q_ * X;
            BigInt r = floor_mod(v.get_num(), v.get_den());
            return dd_from_rational(Rational(r, v.get_den()));
        }
        long need = bit_length(X.get_num()) + 120;
        if (r_->prec() < need)
            fail(ErrorKind::PrecisionExhausted, "omega precision below the bits needed for this length");
        Mp p(r_->prec());
        Mp Xm(r_->prec() + 64, X);
        mpfr_mul(p.get(), r_->get(), Xm.get(), MPFR_RNDN);
        return dd_from_mp(mp_frac(p));
    }

    /// frac(omega * x) for a real length x; @p x must carry enough bits.
    DD turns(const Mp& x) const {
        long p = x.prec() + 64;
        if (!q_ && r_->prec() < x.prec())
            fail(ErrorKind::PrecisionExhausted, "omega precision below the tiling-length precision");
        Mp w = to_mp(p);
        Mp prod(p);
        mpfr_mul(prod.get(), w.get(), x.get(), MPFR_RNDN);
        return dd_from_mp(mp_frac(prod));
    }

    /// Distance to the nearest integer of omega * L.
    double dist(const BigInt& L) const { return dist_from_turns(turns(L)); }
    double dist(const Mp& x) const { return dist_from_turns(turns(x)); }

    static double dist_from_turns(DD t) {
        double f = t.to_double();
        return std::min(f, 1.0 - f);
    }

    std::string str() const {
        if (q_) return q_->get_str();
        return r_->str(30);
    }

private:
    std::optional<Rational> q_;
    std::optional<Mp> r_;
};

namespace freq_detail {

inline Rational parse_decimal(const std::string& s) {
    std::string t = s;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    auto slash = t.find('/');
    Rational q;
    if (slash != std::string::npos) {
        auto digits_only = [](const std::string& x) {
            return !x.empty() && std::all_of(x.begin(), x.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        };
        if (!digits_only(t.substr(0, slash)) || !digits_only(t.substr(slash + 1)))
            fail(ErrorKind::ConfigError, "bad fraction '" + s + "'");
        q = Rational(BigInt(t.substr(0, slash), 10), BigInt(t.substr(slash + 1), 10));
        if (q.get_den() == 0) fail(ErrorKind::ConfigError, "zero denominator in '" + s + "'");
        q.canonicalize();
    } else {
        std::string mant = t;
        long exp10 = 0;
        auto e = t.find_first_of("eE");
        if (e != std::string::npos) {
            mant = t.substr(0, e);
            try {
                exp10 = std::stol(t.substr(e + 1));
            } catch (const std::exception&) {
                fail(ErrorKind::ConfigError, "bad exponent in '" + s + "'");
            }
        }
        auto dot = mant.find('.');
        std::string digits = mant;
        if (dot != std::string::npos) {
            digits = mant.substr(0, dot) + mant.substr(dot + 1);
            exp10 -= static_cast<long>(mant.size() - dot - 1);
        }
        if (digits.empty()) fail(ErrorKind::ConfigError, "empty number");
        for (char c : digits)
            if (!std::isdigit(static_cast<unsigned char>(c))) fail(ErrorKind::ConfigError, "bad number '" + s + "'");
        BigInt n(digits, 10);
        BigInt ten = big_pow(BigInt(10), static_cast<unsigned long>(std::labs(exp10)));
        q = exp10 >= 0 ? Rational(n * ten) : Rational(n, ten);
        q.canonicalize();
    }
    return neg ? Rational(-q) : q;
}

} // namespace freq_detail

inline Frequency Frequency::parse(const std::string& text, long prec) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) fail(ErrorKind::ConfigError, "empty frequency");
    Rational exact(0);
    std::optional<Mp> real;
    size_t i = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        }
        size_t j = i;
        if (s.compare(i, 5, "sqrt(") == 0) {
            auto close = s.find(')', i);
            if (close == std::string::npos) fail(ErrorKind::ConfigError, "unclosed sqrt in '" + text + "'");
            Rational arg = freq_detail::parse_decimal(s.substr(i + 5, close - i - 5));
            Mp v(prec, arg);
            mpfr_sqrt(v.get(), v.get(), MPFR_RNDN);
            if (sign < 0) mpfr_neg(v.get(), v.get(), MPFR_RNDN);
            if (!real) real = Mp(prec);
            mpfr_add(real->get(), real->get(), v.get(), MPFR_RNDN);
            i = close + 1;
            continue;
        }
        while (j < s.size() && s[j] != '+' && !(s[j] == '-' && j > i && s[j - 1] != 'e' && s[j - 1] != 'E')) ++j;
        Rational term = freq_detail::parse_decimal(s.substr(i, j - i));
        exact += sign > 0 ? term : Rational(-term);
        i = j;
    }
    if (!real) return Frequency(exact);
    Mp e(prec, exact);
    mpfr_add(real->get(), real->get(), e.get(), MPFR_RNDN);
    return Frequency::from_real(*real);
}

} // namespace subdyn
