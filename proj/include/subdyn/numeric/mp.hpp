#pragma once
/**
 * @file mp.hpp
 * @brief Big integers (GMP) and an owning wrapper around an MPFR float.
 */

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace subdyn {

using BigInt = mpz_class;
using Rational = mpq_class;

inline long bit_length(const BigInt& x) {
    if (x == 0) return 0;
    return static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2));
}

inline BigInt big_pow(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

/// Floor division with a nonnegative remainder.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline BigInt floor_mod(const BigInt& a, const BigInt& b) {
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

/// Owning MPFR float with an explicit precision.
class Mp {
public:
    explicit Mp(long prec = 128) { mpfr_init2(v_, std::max<long>(prec, MPFR_PREC_MIN)); mpfr_set_zero(v_, 1); }
    Mp(long prec, double x) : Mp(prec) { mpfr_set_d(v_, x, MPFR_RNDN); }
    Mp(long prec, const BigInt& x, mpfr_rnd_t r = MPFR_RNDN) : Mp(prec) { mpfr_set_z(v_, x.get_mpz_t(), r); }
    Mp(long prec, const Rational& x, mpfr_rnd_t r = MPFR_RNDN) : Mp(prec) { mpfr_set_q(v_, x.get_mpq_t(), r); }
    Mp(const Mp& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Mp(Mp&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    Mp& operator=(const Mp& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Mp& operator=(Mp&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Mp() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    long prec() const { return static_cast<long>(mpfr_get_prec(v_)); }

    double to_double(mpfr_rnd_t r = MPFR_RNDN) const { return mpfr_get_d(v_, r); }
    int sign() const { return mpfr_sgn(v_); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }

    /// Copy rounded to another precision.
    Mp with_prec(long prec, mpfr_rnd_t r = MPFR_RNDN) const {
        Mp out(prec);
        mpfr_set(out.v_, v_, r);
        return out;
    }

    std::string str(int digits = 20) const {
        char* buf = nullptr;
        std::string fmt = "%." + std::to_string(digits) + "Rg";
        mpfr_asprintf(&buf, fmt.c_str(), v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

private:
    mpfr_t v_;
};

inline Mp mp_pi(long prec) {
    Mp r(prec);
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

inline Mp operator+(const Mp& a, const Mp& b) {
    Mp r(std::max(a.prec(), b.prec()));
    mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}
inline Mp operator-(const Mp& a, const Mp& b) {
    Mp r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}
inline Mp operator*(const Mp& a, const Mp& b) {
    Mp r(std::max(a.prec(), b.prec()));
    mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}
inline Mp operator/(const Mp& a, const Mp& b) {
    Mp r(std::max(a.prec(), b.prec()));
    mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}
inline Mp operator-(const Mp& a) {
    Mp r(a.prec());
    mpfr_neg(r.get(), a.get(), MPFR_RNDN);
    return r;
}
inline bool operator<(const Mp& a, const Mp& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
inline bool operator>(const Mp& a, const Mp& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
inline bool operator<=(const Mp& a, const Mp& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
inline bool operator>=(const Mp& a, const Mp& b) { return mpfr_greaterequal_p(a.get(), b.get()) != 0; }

inline Mp mp_abs(const Mp& a) {
    Mp r(a.prec());
    mpfr_abs(r.get(), a.get(), MPFR_RNDN);
    return r;
}

inline Mp mp_sqrt(const Mp& a) {
    Mp r(a.prec());
    mpfr_sqrt(r.get(), a.get(), MPFR_RNDN);
    return r;
}

inline Mp mp_log(const Mp& a) {
    Mp r(a.prec());
    mpfr_log(r.get(), a.get(), MPFR_RNDN);
    return r;
}

/// Fractional part in [0,1).
inline Mp mp_frac(const Mp& a) {
    Mp fl(a.prec());
    mpfr_floor(fl.get(), a.get());
    Mp r(a.prec());
    mpfr_sub(r.get(), a.get(), fl.get(), MPFR_RNDN);
    return r;
}

inline BigInt mp_floor_int(const Mp& a) {
    BigInt z;
    mpfr_get_z(z.get_mpz_t(), a.get(), MPFR_RNDD);
    return z;
}

} // namespace subdyn
