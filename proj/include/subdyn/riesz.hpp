#pragma once
/**
 * @file riesz.hpp
 * @brief Matrix Riesz products: transfer matrices M_n(omega), products
 *        Pi_n(omega) = M_{n-1}...M_0, twisted sums Phi_a and the Riesz density.
 *
 * Pi_n(omega)(b, a) = Phi_a(zeta^n(b), omega). Phases are reduced mod 1 from
 * exact big-integer lengths before any floating-point work; products
 * accumulate in double-double with a separate power-of-two scale.
 *
 * Suspension phases: Phi^s_a(v) = sum_j delta_{v_j,a} exp(-2 pi i omega |v_0..v_j|_s)
 * includes the tile v_j itself, while the transfer matrices use exclusive
 * prefix lengths. Hence Phi^s_a(zeta^n(b)) = exp(-2 pi i omega s_a) Pi^s_n(b, a),
 * and with s = (1,...,1) this is exp(-2 pi i omega) Phi_a(zeta^n(b)).
 */

#include "subdyn/numeric/double_double.hpp"
#include "subdyn/numeric/frequency.hpp"
#include "subdyn/roof.hpp"
#include "subdyn/substitution.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace subdyn {

/// Dense complex m x m matrix in double-double.
struct CMat {
    int m = 0;
    std::vector<CDD> a;

    CMat() = default;
    explicit CMat(int n) : m(n), a(static_cast<size_t>(n) * n, CDD{}) {}

    static CMat identity(int n) {
        CMat I(n);
        for (int i = 0; i < n; ++i) I(i, i) = CDD(DD(1.0));
        return I;
    }

    CDD& operator()(int i, int j) { return a[static_cast<size_t>(i) * m + j]; }
    const CDD& operator()(int i, int j) const { return a[static_cast<size_t>(i) * m + j]; }

    friend CMat operator*(const CMat& A, const CMat& B) {
        CMat C(A.m);
        for (int i = 0; i < A.m; ++i)
            for (int k = 0; k < A.m; ++k) {
                const CDD& x = A(i, k);
                if (x.re.hi == 0.0 && x.im.hi == 0.0) continue;
                for (int j = 0; j < A.m; ++j) C(i, j) += x * B(k, j);
            }
        return C;
    }

    /// Operator infinity-norm (max row sum of moduli).
    double norm_inf() const {
        double best = 0.0;
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += (*this)(i, j).abs();
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double best = 0.0;
        for (const auto& x : a) best = std::max(best, std::max(std::abs(x.re.hi), std::abs(x.im.hi)));
        return best;
    }

    std::complex<double> at(int i, int j) const { return (*this)(i, j).to_complex(); }
};

/**
 * M_n(omega)(b, c) = sum over positions j of zeta(b) holding c of
 * exp(-2 pi i omega |zeta^n(zeta(b)_0 .. zeta(b)_{j-1})|_s).
 */
inline CMat transfer_matrix(const Hierarchy& h, int n, const Frequency& w, const Roof* roof = nullptr) {
    const Substitution& z = h.sub();
    int m = z.size();
    CMat M(m);
    bool unit = roof == nullptr || roof->is_unit();
    const BigMatrix& P = h.power(n);
    for (int b = 0; b < m; ++b) {
        const Word& img = z.image(static_cast<Letter>(b));
        std::vector<BigInt> pop(static_cast<size_t>(m), BigInt(0));
        BigInt len = 0;
        for (Letter c : img) {
            DD t = unit ? w.turns(len) : roof->turns(w, pop);
            M(b, static_cast<int>(c)) += cis_neg_turns(t);
            if (unit) len += P.column_sum(static_cast<int>(c));
            else
                for (int i = 0; i < m; ++i) pop[i] += P(i, static_cast<int>(c));
        }
    }
    return M;
}

inline CMat transfer_matrix(const Substitution& z, int n, const Frequency& w, const Roof* roof = nullptr) {
    return transfer_matrix(Hierarchy(z), n, w, roof);
}

/// Pi scaled by 2^scale2; per-step logs are natural logarithms.
struct TwistedProduct {
    int k = 0; ///< first level (shifted products)
    int n = 0;
    CMat matrix;
    long scale2 = 0;
    std::vector<double> step_log_norms; ///< log ||M_{k+i}||_inf
    std::vector<double> log_norms;      ///< log ||Pi_{i+1}||_inf after each step

    std::complex<double> at(int i, int j) const {
        auto c = matrix.at(i, j);
        return {std::ldexp(c.real(), static_cast<int>(scale2)), std::ldexp(c.imag(), static_cast<int>(scale2))};
    }

    CDD at_dd(int i, int j) const { return cdd_ldexp(matrix(i, j), static_cast<int>(scale2)); }

    double log_norm() const {
        double nn = matrix.norm_inf();
        return nn == 0.0 ? -INFINITY : std::log(nn) + static_cast<double>(scale2) * std::log(2.0);
    }
};

/// Pi^(k)_n(omega) = M_{n+k-1}(omega) ... M_k(omega).
inline TwistedProduct shifted_product(const Hierarchy& h, int k, int n, const Frequency& w, const Roof* roof = nullptr) {
    require(k >= 0 && n >= 0, "levels must be nonnegative");
    int m = h.sub().size();
    TwistedProduct T;
    T.k = k;
    T.n = n;
    T.matrix = CMat::identity(m);
    const double ln2 = std::log(2.0);
    for (int i = 0; i < n; ++i) {
        CMat M = transfer_matrix(h, k + i, w, roof);
        double mn = M.norm_inf();
        T.step_log_norms.push_back(mn == 0.0 ? -INFINITY : std::log(mn));
        T.matrix = M * T.matrix;
        double big = T.matrix.max_abs();
        if (big > 0.0) {
            int e = std::ilogb(big);
            if (e > 64 || e < -64) {
                for (auto& x : T.matrix.a) x = cdd_ldexp(x, -e);
                T.scale2 += e;
            }
        }
        double nn = T.matrix.norm_inf();
        T.log_norms.push_back(nn == 0.0 ? -INFINITY : std::log(nn) + static_cast<double>(T.scale2) * ln2);
    }
    return T;
}

inline TwistedProduct riesz_product(const Hierarchy& h, int n, const Frequency& w, const Roof* roof = nullptr) {
    return shifted_product(h, 0, n, w, roof);
}

inline TwistedProduct riesz_product(const Substitution& z, int n, const Frequency& w, const Roof* roof = nullptr) {
    return shifted_product(Hierarchy(z), 0, n, w, roof);
}

/// Phi_a(zeta^n(b), omega) without expanding words.
inline std::complex<double> phi_recursive(const Hierarchy& h, Letter a, Letter b, int n, const Frequency& w) {
    return riesz_product(h, n, w).at(static_cast<int>(b), static_cast<int>(a));
}

inline std::complex<double> phi_recursive(const Substitution& z, Letter a, Letter b, int n, const Frequency& w) {
    return phi_recursive(Hierarchy(z), a, b, n, w);
}

/// Phi^s_a(zeta^n(b), omega) with the inclusive tile-length convention.
inline std::complex<double> phi_suspension(const Hierarchy& h, const Roof& s, Letter a, Letter b, int n, const Frequency& w) {
    require(s.size() == h.sub().size(), "roof dimension mismatch");
    std::vector<BigInt> ea(static_cast<size_t>(s.size()), BigInt(0));
    ea[a] = 1;
    CDD lead = cis_neg_turns(s.turns(w, ea));
    CDD v = riesz_product(h, n, w, &s).at_dd(static_cast<int>(b), static_cast<int>(a));
    return (lead * v).to_complex();
}

/// Direct sum over the word, used as an oracle. Budget guards the length.
inline std::complex<double> phi_direct(const Word& v, Letter a, const Frequency& w, size_t budget = 1u << 26) {
    if (v.size() > budget) fail(ErrorKind::BudgetExceeded, "word longer than the phi_direct budget");
    CDD zs = cis_neg_turns(w.turns(BigInt(1)));
    CDD cur(DD(1.0));
    CDD sum{};
    for (size_t j = 0; j < v.size(); ++j) {
        if (j % 1024 == 0) cur = cis_neg_turns(w.turns(BigInt(static_cast<unsigned long>(j))));
        if (v[j] == a) sum += cur;
        cur = cur * zs;
    }
    return sum.to_complex();
}

/// Direct suspension sum: phases use the inclusive length |v_0..v_j|_s.
inline std::complex<double> phi_direct_suspension(const Word& v, Letter a, const Frequency& w, const Roof& s,
                                                  size_t budget = 1u << 22) {
    if (v.size() > budget) fail(ErrorKind::BudgetExceeded, "word longer than the phi_direct budget");
    std::vector<BigInt> pop(static_cast<size_t>(s.size()), BigInt(0));
    CDD sum{};
    for (Letter c : v) {
        pop[c] += 1;
        if (c == a) sum += cis_neg_turns(s.turns(w, pop));
    }
    return sum.to_complex();
}

/// Hermitian m x m matrix stored row-major.
struct DensityMatrix {
    int m = 0;
    std::vector<std::complex<double>> a;
    std::complex<double> operator()(int i, int j) const { return a[static_cast<size_t>(i) * m + j]; }
};

/**
 * theta^{-n} conj(Pi_n^* Pi_n)(omega) / (<r,1><1,l>): entry (a,b) is
 * sum_j Phi_a(zeta^n(j)) conj(Phi_b(zeta^n(j))) times the normalization.
 */
inline DensityMatrix riesz_density(const Hierarchy& h, const PerronData& pd, int n, const Frequency& w) {
    int m = h.sub().size();
    TwistedProduct T = riesz_product(h, n, w);
    double rs = 0.0, ls = 0.0;
    for (int i = 0; i < m; ++i) {
        rs += pd.r_d[i];
        ls += pd.l_d[i];
    }
    // Fold theta^{-n} and the 2^{2 scale} factor into one exponent.
    double logf = -n * std::log(pd.theta_d) + 2.0 * static_cast<double>(T.scale2) * std::log(2.0) - std::log(rs * ls);
    double f = std::exp(logf);
    DensityMatrix D;
    D.m = m;
    D.a.assign(static_cast<size_t>(m) * m, 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            CDD s{};
            for (int j = 0; j < m; ++j) s += T.matrix(j, a) * T.matrix(j, b).conj();
            D.a[static_cast<size_t>(a) * m + b] = s.to_complex() * f;
        }
    return D;
}

} // namespace subdyn
