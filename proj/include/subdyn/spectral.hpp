#pragma once
/**
 * @file spectral.hpp
 * @brief Twisted Birkhoff sums, G_N estimates, Fejer ball bounds, the
 *        return-word product bounds and their constants, Holder exponents,
 *        the eigenvalue test, local-dimension bounds and zero-frequency growth.
 *
 * The product bounds run on Z = zeta^l where l is the return-word power, so
 * that vc is a factor of every Z(b). Levels n and lengths |Z^k(v)| refer to Z.
 */

#include "subdyn/error.hpp"
#include "subdyn/numeric/frequency.hpp"
#include "subdyn/riesz.hpp"
#include "subdyn/roof.hpp"
#include "subdyn/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace subdyn {

namespace spec_detail {

inline double big_log(const BigInt& x) {
    if (x <= 0) return -INFINITY;
    long e = 0;
    double d = mpz_get_d_2exp(&e, x.get_mpz_t());
    return std::log(d) + static_cast<double>(e) * std::log(2.0);
}

inline double log_base(double x, double theta) { return std::log(x) / std::log(theta); }

/// Least-squares slope and intercept of y against x.
inline std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    require(n >= 2, "a line fit needs two points");
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

} // namespace spec_detail

/**
 * Phi_a over windows of the fixed point of fp.sub(), assembled from the
 * prefix-suffix decomposition and cached products Pi_j(omega). With a roof the
 * sums use the inclusive suspension phases.
 */
class WindowSums {
public:
    WindowSums(const FixedPoint& fp, const Frequency& w, const Roof* roof = nullptr)
        : fp_(fp), w_(w), m_(fp.sub().size()) {
        if (roof && !roof->is_unit()) {
            require(roof->size() == m_, "roof dimension mismatch");
            roof_ = *roof;
            for (int a = 0; a < m_; ++a) {
                std::vector<BigInt> ea(static_cast<size_t>(m_), BigInt(0));
                ea[a] = 1;
                lead_.push_back(cis_neg_turns(roof_->turns(w_, ea)).to_complex());
            }
        }
        levels_.push_back(CMat::identity(m_));
        scales_.push_back(0);
    }

    const FixedPoint& fixed_point() const { return fp_; }

    /// Pi_j(b, a) as a double complex number.
    std::complex<double> block(int j, Letter b, Letter a) {
        extend(j);
        auto c = levels_[j](static_cast<int>(b), static_cast<int>(a)).to_complex();
        int e = static_cast<int>(scales_[j]);
        return {std::ldexp(c.real(), e), std::ldexp(c.imag(), e)};
    }

    /// Phi_a(word) for every a, where the word is given by its decomposition.
    std::vector<std::complex<double>> phi(const Decomposition& d) {
        std::vector<std::complex<double>> out(static_cast<size_t>(m_), 0.0);
        const Hierarchy& h = fp_.hierarchy();
        BigInt off = 0;
        std::vector<BigInt> pop(static_cast<size_t>(m_), BigInt(0));
        for (const auto& piece : d.pieces()) {
            extend(piece.level);
            const BigMatrix& P = h.power(piece.level);
            for (Letter b : piece.w) {
                std::complex<double> ph =
                    roof_ ? cis_neg_turns(roof_->turns(w_, pop)).to_complex() : cis_neg_turns(w_.turns(off)).to_complex();
                for (int a = 0; a < m_; ++a) {
                    std::complex<double> v = block(piece.level, b, static_cast<Letter>(a));
                    if (roof_) v *= lead_[a];
                    out[a] += ph * v;
                }
                if (roof_)
                    for (int i = 0; i < m_; ++i) pop[i] += P(i, static_cast<int>(b));
                else
                    off += P.column_sum(static_cast<int>(b));
            }
        }
        return out;
    }

    /// Phi_a(x[lo, lo + N)) for every a.
    std::vector<std::complex<double>> window(const BigInt& lo, const BigInt& N) {
        return phi(decompose_window(fp_, lo, lo + N));
    }

private:
    void extend(int j) {
        while (static_cast<int>(levels_.size()) <= j) {
            int k = static_cast<int>(levels_.size()) - 1;
            CMat M = transfer_matrix(fp_.hierarchy(), k, w_, roof_ ? &*roof_ : nullptr);
            CMat P = M * levels_.back();
            long sc = scales_.back();
            double big = P.max_abs();
            if (big > 0.0) {
                int e = std::ilogb(big);
                if (e > 64 || e < -64) {
                    for (auto& x : P.a) x = cdd_ldexp(x, -e);
                    sc += e;
                }
            }
            levels_.push_back(std::move(P));
            scales_.push_back(sc);
        }
    }

    FixedPoint fp_;
    Frequency w_;
    int m_;
    std::optional<Roof> roof_;
    std::vector<std::complex<double>> lead_;
    std::vector<CMat> levels_;
    std::vector<long> scales_;
};

/// S_N^x(f, omega) = sum_a d_a Phi_a(x[0, N-1], omega) for a legal word x[0, N-1].
inline std::complex<double> birkhoff_twisted(const Substitution& z, const std::vector<std::complex<double>>& d,
                                             const Word& x_prefix, const Frequency& w) {
    require(static_cast<int>(d.size()) == z.size(), "one coefficient per letter");
    if (x_prefix.empty()) return 0.0;
    FixedPoint fp(z);
    Decomposition dec = prefix_suffix_decomposition(fp, x_prefix);
    WindowSums ws(fp, w);
    auto phi = ws.phi(dec);
    std::complex<double> s = 0.0;
    for (size_t a = 0; a < d.size(); ++a) s += d[a] * phi[a];
    return s;
}

struct GEstimate {
    double mean = 0.0; ///< average of |S_N^x|^2 / N over the windows
    double sup = 0.0;  ///< largest |S_N^x|^2 / N
    double min = 0.0;
    long N = 0;
    int samples = 0;
    std::vector<std::complex<double>> sums;
};

/**
 * G_N(f, omega) from windows x = T^{o_i} of the fixed point with o_i = i * stride.
 * The default stride N gives disjoint consecutive windows.
 */
inline GEstimate g_estimate(const Substitution& z, const std::vector<std::complex<double>>& d, const Frequency& w,
                            long N, int sample_count = 64, long stride = 0) {
    require(sample_count >= 1, "sample_count must be >= 1");
    require(N >= 1, "N must be >= 1");
    require(static_cast<int>(d.size()) == z.size(), "one coefficient per letter");
    if (stride <= 0) stride = N;
    FixedPoint fp(z);
    WindowSums ws(fp, w);
    GEstimate g;
    g.N = N;
    g.samples = sample_count;
    g.min = INFINITY;
    for (int i = 0; i < sample_count; ++i) {
        auto phi = ws.window(BigInt(static_cast<long>(i)) * BigInt(stride), BigInt(N));
        std::complex<double> s = 0.0;
        for (size_t a = 0; a < d.size(); ++a) s += d[a] * phi[a];
        double v = std::norm(s) / static_cast<double>(N);
        g.sums.push_back(s);
        g.mean += v;
        g.sup = std::max(g.sup, v);
        g.min = std::min(g.min, v);
    }
    g.mean /= sample_count;
    return g;
}

/// N = floor(1 / (2r)).
inline long fejer_N(double r) {
    if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "radius must be positive");
    if (r > 0.5) fail(ErrorKind::RadiusTooLarge, "radius " + std::to_string(r) + " exceeds 1/2");
    return static_cast<long>(std::floor(1.0 / (2.0 * r)));
}

struct FejerBound {
    long N = 0;
    double upper = 0.0;
    bool vacuous = false; ///< upper bound at least the total mass
};

/// sigma_f(B(omega, r)) <= pi^2 / (4N) G_N(f, omega) with N = floor(1/(2r)).
inline FejerBound fejer_ball_bound(double G, long N, double total_mass = 1.0) {
    require(N >= 1, "N must be >= 1");
    require(G >= 0.0, "G_N is nonnegative");
    FejerBound b;
    b.N = N;
    b.upper = M_PI * M_PI / (4.0 * static_cast<double>(N)) * G;
    b.vacuous = b.upper >= total_mass;
    return b;
}

/// pi^2 C / 4 * Omega(factor * r): factor 3 for Z-actions, 2 for flows.
template <class Omega>
inline double variation_bound(double C, Omega&& omega_fn, double r, double factor = 3.0) {
    require(r > 0.0, "radius must be positive");
    return M_PI * M_PI * C / 4.0 * omega_fn(factor * r);
}

struct SpectralBound {
    Frequency omega;
    double r = 0.0;
    long N = 0;
    double G = 0.0;
    double upper = 0.0;
    bool vacuous = false;
    std::optional<double> exponent;
};

/// Fejer bound for sigma_f(B(omega, r)) with G_N estimated from fixed-point windows.
inline SpectralBound spectral_ball_bound(const Substitution& z, const std::vector<std::complex<double>>& d,
                                         const Frequency& w, double r, int sample_count = 64) {
    SpectralBound s;
    s.omega = w;
    s.r = r;
    s.N = fejer_N(r);
    GEstimate g = g_estimate(z, d, w, s.N, sample_count);
    s.G = g.mean;
    double mass = 0.0;
    for (auto x : d) mass += std::norm(x);
    FejerBound fb = fejer_ball_bound(g.mean, s.N, mass);
    s.upper = fb.upper;
    s.vacuous = fb.vacuous;
    return s;
}

/**
 * Constants of the return-word product bounds for Z = zeta^power.
 *  c3(x) = x_c / (2 m rowmax(S_Z^t) max x); c1 = min_{k <= k_max} c3((S_Z^t)^k 1)
 *  capped at (theta-1)/(theta+1); c1_tail bounds c3 for k > k_max through the
 *  PF eigenvector of S_Z^t. c theta^j <= |Z^j(b)| <= c' theta^j for all j >= 0.
 */
struct DiophConstants {
    Substitution Z;
    Word v;
    Letter c = 0;
    int power = 1;
    int k_max = 0;
    double theta = 0.0;       ///< PF eigenvalue of Z
    double c1 = 0.0;          ///< finite minimum, valid for levels n <= k_max + 1
    double c1_tail = 0.0;
    double c1_uniform = 0.0;  ///< valid for every level
    double c_lo = 0.0, c_hi = 0.0;
    double Cprime = 0.0;      ///< c'/c
    double C2 = 0.0;          ///< log_theta(2c') + 1
    double theta_prime = 0.0; ///< (1 + theta) / 2
    long L = 0;               ///< max |Z(b)|
    double Cdd = 0.0;         ///< 2 L c' theta / (c (theta - theta')) * C'

    double c1_at(int n) const { return n <= k_max + 1 ? c1 : c1_uniform; }
};

inline DiophConstants dioph_constants(const Substitution& z, const ReturnWord& rw, int k_max = 64) {
    require(k_max >= 0, "k_max must be >= 0");
    require(rw.power >= 1 && !rw.v.empty() && rw.v[0] == rw.c, "invalid return word");
    DiophConstants k;
    k.Z = rw.power == 1 ? z : z.power(rw.power);
    k.v = rw.v;
    k.c = rw.c;
    k.power = rw.power;
    k.k_max = k_max;
    int m = k.Z.size();
    BigMatrix S = substitution_matrix(k.Z);
    PerronData pd = perron_data(S);
    double th = pd.theta_d;
    k.theta = th;

    // Row sums of S^t are image lengths.
    double rowmax = 0.0;
    for (int b = 0; b < m; ++b) rowmax = std::max(rowmax, static_cast<double>(k.Z.image(static_cast<Letter>(b)).size()));
    k.L = static_cast<long>(rowmax);
    auto c3 = [&](const std::vector<double>& x) {
        double mx = *std::max_element(x.begin(), x.end());
        return x[k.c] / (2.0 * m * rowmax * mx);
    };

    // y_k = (S^t)^k 1 / theta^k, so y_k(b) = |Z^k(b)| / theta^k.
    std::vector<double> y(static_cast<size_t>(m), 1.0);
    double c1 = INFINITY, lo = INFINITY, hi = 0.0;
    for (int kk = 0; kk <= k_max; ++kk) {
        c1 = std::min(c1, c3(y));
        for (double t : y) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        if (kk == k_max) break;
        std::vector<double> ny(static_cast<size_t>(m), 0.0);
        for (int b = 0; b < m; ++b)
            for (int j = 0; j < m; ++j) ny[b] += static_cast<double>(S(j, b).get_si()) * y[j];
        for (auto& t : ny) t /= th;
        y = std::move(ny);
    }
    // Tail: lo_r theta^j w <= (S^t)^{K+j} 1 / theta^K <= hi_r theta^j w.
    const std::vector<double>& wv = pd.l_d;
    double lo_r = INFINITY, hi_r = 0.0;
    for (int b = 0; b < m; ++b) {
        lo_r = std::min(lo_r, y[b] / wv[b]);
        hi_r = std::max(hi_r, y[b] / wv[b]);
    }
    double wmax = *std::max_element(wv.begin(), wv.end());
    double wmin = *std::min_element(wv.begin(), wv.end());
    const double safety = 1e-12;
    k.c1_tail = lo_r * wv[k.c] / (hi_r * wmax) / (2.0 * m * rowmax) * (1.0 - safety);
    double cap = (th - 1.0) / (th + 1.0);
    k.c1 = std::min(c1 * (1.0 - safety), cap);
    k.c1_uniform = std::min(k.c1, k.c1_tail);
    k.c_lo = std::min(lo, lo_r * wmin) * (1.0 - safety);
    k.c_hi = std::max(hi, hi_r * wmax) * (1.0 + safety);
    k.Cprime = k.c_hi / k.c_lo;
    k.C2 = spec_detail::log_base(2.0 * k.c_hi, th) + 1.0;
    k.theta_prime = (1.0 + th) / 2.0;
    k.Cdd = 2.0 * static_cast<double>(k.L) * k.c_hi * th / (k.c_lo * (th - k.theta_prime)) * k.Cprime;
    return k;
}

inline DiophConstants dioph_constants(const Substitution& z, int k_max = 64) {
    return dioph_constants(z, find_return_word(z), k_max);
}

/// ||omega |Z^k(v)|_s|| for k < n (unit roof when @p roof is null).
inline std::vector<double> return_word_distances(const Hierarchy& h, const Word& v, const Frequency& w, int n,
                                                 const Roof* roof = nullptr) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
        if (roof && !roof->is_unit()) out.push_back(Frequency::dist_from_turns(roof->turns(w, h.pop(k, v))));
        else out.push_back(w.dist(h.length(k, v)));
    }
    return out;
}

struct ProductBound {
    double bound = 0.0;
    double product = 1.0;
    int factors = 0;
};

/**
 * C' |Z^n(b)| prod_{k<n} (1 - c1 ||omega |Z^k(v)|||^2); with a roof the
 * prefactor is C'/min s and lengths are tiling lengths.
 */
inline ProductBound dioph_product_bound(const DiophConstants& k, Letter b, const Frequency& w, int n,
                                        const Roof* roof = nullptr) {
    require(n >= 0, "level must be >= 0");
    Hierarchy h(k.Z);
    double c1 = k.c1_at(n);
    auto d = return_word_distances(h, k.v, w, n, roof);
    ProductBound p;
    double logp = 0.0;
    for (double x : d) logp += std::log1p(-c1 * x * x);
    p.product = std::exp(logp);
    p.factors = n;
    bool susp = roof && !roof->is_unit();
    double len = susp ? roof->length_d(h.pop(n, b)) : std::exp(spec_detail::big_log(h.length(n, b)));
    double pref = susp ? k.Cprime / roof->min() : k.Cprime;
    p.bound = pref * len * p.product;
    return p;
}

/// C'' N prod_{k < floor(log_theta N - C2)} (1 - c1 ||omega |Z^k(v)|||^2), valid for every x.
inline ProductBound birkhoff_product_bound(const DiophConstants& k, const Frequency& w, long N) {
    require(N >= 1, "N must be >= 1");
    double e = std::floor(spec_detail::log_base(static_cast<double>(N), k.theta) - k.C2);
    int n = e < 0 ? 0 : static_cast<int>(e);
    Hierarchy h(k.Z);
    double c1 = k.c1_uniform;
    ProductBound p;
    double logp = 0.0;
    for (double x : return_word_distances(h, k.v, w, n)) logp += std::log1p(-c1 * x * x);
    p.product = std::exp(logp);
    p.factors = n;
    p.bound = k.Cdd * static_cast<double>(N) * p.product;
    return p;
}

struct GammaProfile {
    std::vector<double> dist;     ///< ||omega |zeta^k(v)|_s|| for k < n_max
    std::vector<double> fraction; ///< fraction[n-1] = #{k < n : dist >= delta} / n
    double liminf_estimate = 0.0; ///< min of the fractions over n in [n_max/2, n_max]
    bool empirical = true;
};

inline GammaProfile gamma_frequency(const Substitution& z, const Word& v, const Frequency& w, double delta, int n_max,
                                    const Roof* roof = nullptr) {
    require(delta > 0.0 && delta <= 0.5, "delta must lie in (0, 1/2]");
    require(n_max >= 1, "n_max must be >= 1");
    GammaProfile g;
    g.dist = return_word_distances(Hierarchy(z), v, w, n_max, roof);
    int cnt = 0;
    for (int n = 1; n <= n_max; ++n) {
        if (g.dist[n - 1] >= delta) ++cnt;
        g.fraction.push_back(static_cast<double>(cnt) / n);
    }
    g.liminf_estimate = 1.0;
    for (int n = std::max(1, n_max / 2); n <= n_max; ++n) g.liminf_estimate = std::min(g.liminf_estimate, g.fraction[n - 1]);
    return g;
}

struct HolderExponent {
    double beta = 0.0;
    bool degenerate = false;
};

/// beta = -2 eps log_theta(1 - c1 delta^2).
inline HolderExponent holder_exponent(double theta, double c1, double delta, double eps) {
    require(theta > 1.0, "theta must exceed 1");
    require(c1 > 0.0 && c1 < 1.0, "c1 must lie in (0,1)");
    require(delta >= 0.0 && delta <= 0.5, "delta must lie in [0, 1/2]");
    require(eps >= 0.0 && eps <= 1.0, "eps must lie in [0, 1]");
    HolderExponent h;
    h.beta = -2.0 * eps * std::log1p(-c1 * delta * delta) / std::log(theta);
    if (h.beta == 0.0) h.beta = 0.0;
    h.degenerate = eps == 0.0 || delta == 0.0;
    return h;
}

enum class EigenVerdict { Converging, Diverging, Inconclusive };

inline const char* verdict_name(EigenVerdict v) {
    switch (v) {
        case EigenVerdict::Converging: return "Converging";
        case EigenVerdict::Diverging: return "Diverging";
        case EigenVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct EigenTest {
    std::vector<double> partial; ///< sum_{k <= n} ||omega |zeta^k(v)|||^2
    double tail_slope = 0.0;     ///< slope of log term vs k over the tail half
    double tail_mean = 0.0;
    EigenVerdict verdict = EigenVerdict::Inconclusive;
};

/**
 * Heuristic: Converging when the tail terms vanish or decay geometrically,
 * Diverging when they stay bounded below on average. Never a proof.
 */
inline EigenTest eigenvalue_test(const Substitution& z, const Word& v, const Frequency& w, int n_max) {
    require(n_max >= 4, "n_max must be >= 4");
    EigenTest t;
    auto d = return_word_distances(Hierarchy(z), v, w, n_max);
    double s = 0.0;
    for (double x : d) t.partial.push_back(s += x * x);
    int from = n_max / 2;
    std::vector<double> ks, ls;
    double sum = 0.0;
    for (int k = from; k < n_max; ++k) {
        double term = d[k] * d[k];
        sum += term;
        if (term > 0.0) {
            ks.push_back(k);
            ls.push_back(std::log(term));
        }
    }
    t.tail_mean = sum / (n_max - from);
    if (ks.size() >= 2) t.tail_slope = spec_detail::fit_line(ks, ls).first;
    if (t.tail_mean == 0.0 || (ks.size() >= 2 && t.tail_slope < -0.05 && ls.back() < std::log(1e-6)))
        t.verdict = EigenVerdict::Converging;
    else if (t.tail_mean >= 1e-3)
        t.verdict = EigenVerdict::Diverging;
    return t;
}

struct LocalDimension {
    double alpha = 0.0;
    double bound = 0.0;           ///< 2 - 2 log_theta(alpha) clipped to [0, 2]
    std::vector<double> log_norms; ///< log ||Pi_n(omega)||_inf for n = 1..n_max
};

/// 2 - 2 log_theta(alpha) clipped to [0, 2].
inline double local_dimension_from_alpha(double theta, double alpha) {
    require(theta > 1.0 && alpha > 0.0, "need theta > 1 and alpha > 0");
    return std::clamp(2.0 - 2.0 * std::log(alpha) / std::log(theta), 0.0, 2.0);
}

/**
 * alpha_omega = theta * max_{n in [n_max/2, n_max]} (||Pi_n(omega)|| / ||(S^t)^n||)^{1/n}
 * in the infinity norm; the ratio makes alpha_0 = theta exact and alpha <= theta.
 */
inline LocalDimension local_dimension_bound(const Substitution& z, const Frequency& w, int n_max,
                                            const Roof* roof = nullptr) {
    require(n_max >= 10, "n_max must be >= 10");
    Hierarchy h(z);
    PerronData pd = perron_data(h.matrix());
    TwistedProduct T = riesz_product(h, n_max, w, roof);
    LocalDimension ld;
    ld.log_norms = T.log_norms;
    double best = -INFINITY;
    for (int n = n_max / 2; n <= n_max; ++n) {
        BigInt mx = 0;
        for (const auto& x : h.lengths(n)) mx = std::max(mx, x);
        double r = (T.log_norms[n - 1] - spec_detail::big_log(mx)) / n;
        best = std::max(best, r);
    }
    best = std::min(best, 0.0);
    ld.alpha = pd.theta_d * std::exp(best);
    ld.bound = best == 0.0 ? 0.0 : std::clamp(-2.0 * best / std::log(pd.theta_d), 0.0, 2.0);
    return ld;
}

struct ZeroExponent {
    std::vector<long> N;
    std::vector<double> max_abs; ///< max over offsets of |S_N^x(f, 0)|
    double slope = 0.0;          ///< fit of log max_abs vs log N over N >= N_max / theta^3
    double log_slope = 0.0;      ///< fit of max_abs vs log N (|theta_2| = 1 case)
    double predicted = 0.0;      ///< log_theta |theta_2|, 0 when |theta_2| < 1
    double theta2_modulus = 0.0;
};

/**
 * Growth of the untwisted sums sum_{n<N} d_{x_n}: maxima over all offsets
 * o < N_max of the fixed point, for N = round(theta^k) <= N_max. The maxima
 * grow in steps at the renormalization scales theta^k, so a dyadic grid
 * would bias the fitted slope whenever theta is not 2.
 */
inline ZeroExponent zero_exponent_scan(const Substitution& z, const std::vector<double>& d, long N_max) {
    require(static_cast<int>(d.size()) == z.size(), "one coefficient per letter");
    require(N_max >= 16, "N_max must be >= 16");
    PerronData pd = perron_data(substitution_matrix(z));
    double mean = 0.0, scale = 0.0;
    for (size_t a = 0; a < d.size(); ++a) {
        mean += d[a] * pd.r_d[a];
        scale += std::abs(d[a]);
    }
    if (std::abs(mean) > 1e-12 * std::max(1.0, scale))
        fail(ErrorKind::NotMeanZero, "sum d_a mu[a] = " + std::to_string(mean));
    ZeroExponent out;
    double t2 = 0.0;
    bool skipped = false;
    for (const auto& r : pd.roots.roots) {
        double md = r.modulus_double();
        if (!skipped && r.real && std::abs(r.re.to_double() - pd.theta_d) < 1e-9 * pd.theta_d) {
            skipped = true;
            continue;
        }
        t2 = std::max(t2, md);
    }
    out.theta2_modulus = t2;
    out.predicted = t2 > 1.0 ? std::log(t2) / std::log(pd.theta_d) : 0.0;

    FixedPoint fp(z);
    size_t M = static_cast<size_t>(2 * N_max);
    Word x = fp.prefix(M);
    std::vector<double> P(M + 1, 0.0);
    for (size_t i = 0; i < M; ++i) P[i + 1] = P[i] + d[x[i]];
    std::vector<double> lx, ly, lz;
    std::vector<long> grid;
    for (int k = 0;; ++k) {
        long N = std::lround(std::pow(pd.theta_d, k));
        if (N > N_max) break;
        if (grid.empty() || N > grid.back()) grid.push_back(N);
    }
    const double fit_from = static_cast<double>(N_max) / std::pow(pd.theta_d, 3) * (1.0 - 1e-9);
    for (long N : grid) {
        double best = 0.0;
        for (size_t o = 0; o + static_cast<size_t>(N) <= M && o < static_cast<size_t>(N_max); ++o)
            best = std::max(best, std::abs(P[o + N] - P[o]));
        out.N.push_back(N);
        out.max_abs.push_back(best);
        if (static_cast<double>(N) >= fit_from) {
            lx.push_back(std::log(static_cast<double>(N)));
            ly.push_back(std::log(std::max(best, 1e-300)));
            lz.push_back(best);
        }
    }
    if (lx.size() >= 2) {
        out.slope = spec_detail::fit_line(lx, ly).first;
        out.log_slope = spec_detail::fit_line(lx, lz).first;
    }
    return out;
}

} // namespace subdyn
