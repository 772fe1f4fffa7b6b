#pragma once
/**
 * @file flows.hpp
 * @brief Suspension flows over substitutions: tiling coordinates, twisted
 *        ergodic integrals, the flow product bound, the log-Hölder
 *        certificate, the cocycle Phi_2^+ and the zero-frequency scaling
 *        experiment.
 *
 * Points of the flow are anchored in the tiling of the fixed point of
 * FixedPoint(zeta).sub(): a FlowPoint (n, u) sits at offset u inside tile n,
 * and its tiling coordinate is |x[0, n)|_s + u.
 */

#include "subdyn/algebraic.hpp"
#include "subdyn/error.hpp"
#include "subdyn/numeric/frequency.hpp"
#include "subdyn/numeric/mp.hpp"
#include "subdyn/numeric/polynomial.hpp"
#include "subdyn/roof.hpp"
#include "subdyn/spectral.hpp"
#include "subdyn/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace subdyn {

struct SuspensionFlow {
    Substitution zeta;
    Roof roof;
    bool self_similar = false;

    static SuspensionFlow make(const Substitution& z, Roof r) {
        require(r.size() == z.size(), "roof dimension mismatch");
        if (!is_primitive(substitution_matrix(z)).primitive) fail(ErrorKind::NotPrimitive, "flow needs a primitive substitution");
        bool ss = r.is_self_similar();
        return {z, std::move(r), ss};
    }

    static SuspensionFlow make_self_similar(const Substitution& z) { return {z, Roof::self_similar(z), true}; }
};

/// PF eigenvector of S^t on the simplex.
inline Roof self_similar_roof(const Substitution& z) { return Roof::self_similar(z); }

/// Exact roof rescaled so that the entries sum to 1.
inline Roof simplex_roof(std::vector<Rational> s) {
    Rational sum = 0;
    for (const auto& x : s) sum += x;
    if (sum <= 0) fail(ErrorKind::InvalidArgument, "roof entries must be positive");
    for (auto& x : s) x /= sum;
    return Roof::exact(std::move(s));
}

/// max over n <= n_max of | |zeta^n(v)|_s - theta^n |v|_s | / (theta^n |v|_s).
inline double self_similar_length_defect(const SuspensionFlow& f, const Word& v, int n_max, long prec = 512) {
    require(f.self_similar, "length identity needs the self-similar roof");
    require(!v.empty(), "empty word");
    Hierarchy h(f.zeta);
    PerronData pd = perron_data(substitution_matrix(f.zeta), prec + 64);
    Mp th = pd.theta.mid();
    Mp base = f.roof.length(h.pop(0, v), prec);
    Mp tn(prec, 1.0);
    double worst = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        Mp direct = f.roof.length(h.pop(n, v), prec);
        Mp scaled = tn * base;
        worst = std::max(worst, std::abs(((direct - scaled) / scaled).to_double()));
        tn = tn * th;
    }
    return worst;
}

struct FlowPoint {
    BigInt n = 0;
    Mp u{256};
};

/// Tiling coordinates of the fixed point of FixedPoint(zeta).sub().
class FlowTiling {
public:
    explicit FlowTiling(const SuspensionFlow& f, long prec = 256) : flow_(f), fp_(f.zeta), prec_(prec) {
        for (const auto& x : f.roof.values(prec)) s_.push_back(x);
    }

    const SuspensionFlow& flow() const { return flow_; }
    const FixedPoint& fixed_point() const { return fp_; }
    long prec() const { return prec_; }
    const Mp& tile(Letter a) const { return s_[a]; }
    Letter letter(const BigInt& n) const { return fp_.letter_at(n); }

    /// Letter counts of x[lo, hi).
    std::vector<BigInt> pop(const BigInt& lo, const BigInt& hi) const {
        int m = flow_.zeta.size();
        std::vector<BigInt> out(static_cast<size_t>(m), BigInt(0));
        if (lo >= hi) return out;
        const Hierarchy& h = fp_.hierarchy();
        for (const auto& piece : decompose_window(fp_, lo, hi).pieces()) {
            auto p = h.pop(piece.level, piece.w);
            for (int i = 0; i < m; ++i) out[i] += p[i];
        }
        return out;
    }

    Mp length(const std::vector<BigInt>& pop) const { return flow_.roof.length(pop, prec_); }

    /// |x[0, n)|_s.
    Mp position(const BigInt& n) const { return length(pop(0, n)); }
    Mp position(const FlowPoint& p) const { return position(p.n) + p.u; }

    /// The point at tiling coordinate X >= 0.
    FlowPoint locate(const Mp& X) const {
        if (X.sign() < 0) fail(ErrorKind::InvalidArgument, "tiling coordinate must be >= 0");
        const Hierarchy& h = fp_.hierarchy();
        const Substitution& z = fp_.sub();
        auto len = [&](int L, Letter b) { return length(h.pop(L, b)); };
        int L = 0;
        Letter b = fp_.letter();
        while (len(L, b) <= X) ++L;
        Mp start(prec_);
        BigInt idx = 0;
        // Coordinates within a few ulps of a tile end count as the next tile.
        Mp slack = Mp(prec_, std::ldexp(1.0, -static_cast<int>(prec_ - 40))) * (X + Mp(prec_, 1.0));
        while (L > 0) {
            for (Letter c : z.image(b)) {
                Mp lc = len(L - 1, c);
                if (X < start + lc - slack) {
                    b = c;
                    break;
                }
                start = start + lc;
                idx += h.length(L - 1, c);
            }
            --L;
        }
        Mp u = (X - start).with_prec(prec_);
        if (u < slack) u = Mp(prec_);
        return {idx, u};
    }

private:
    SuspensionFlow flow_;
    FixedPoint fp_;
    long prec_;
    std::vector<Mp> s_;
};

namespace flow_detail {

/// (1 - e^{-2 pi i omega L}) / (2 pi i omega), or L at omega = 0.
inline std::complex<double> tile_factor(const Frequency& w, const Mp& L) {
    if (w.is_zero()) return L.to_double();
    std::complex<double> e = cis_neg_turns(w.turns(L)).to_complex();
    return (1.0 - e) / std::complex<double>(0.0, 2.0 * M_PI * w.to_double());
}

inline std::complex<double> phase(const Frequency& w, const Mp& D) {
    if (w.is_zero()) return 1.0;
    return cis_neg_turns(w.turns(D)).to_complex();
}

} // namespace flow_detail

struct TwistedIntegral {
    std::complex<double> value;
    double correction = 0.0; ///< total length of the partial tiles at both ends
    BigInt full_tiles = 0;
};

/**
 * S_R(1_{X_a}, omega) = int_0^R e^{-2 pi i omega tau} 1_{X_a}(h_tau x) dtau.
 * Full tiles go through the window sums; each tile starting at A contributes
 * e^{-2 pi i omega A} (1 - e^{-2 pi i omega s_a}) / (2 pi i omega).
 */
class TwistedIntegrator {
public:
    TwistedIntegrator(const FlowTiling& ft, const Frequency& w)
        : ft_(ft), w_(w), ws_(ft.fixed_point(), w, &ft.flow().roof), unit_(ft.flow().roof.is_unit()) {}

    TwistedIntegral integral(const FlowPoint& x, Letter a, const Mp& R) {
        require(R.sign() > 0, "R must be > 0");
        int m = ft_.flow().zeta.size();
        require(static_cast<int>(a) < m, "letter out of range");
        long prec = ft_.prec();
        Mp P0 = ft_.position(x.n);
        FlowPoint end = ft_.locate(P0 + x.u + R);
        TwistedIntegral out;
        Letter b0 = ft_.letter(x.n);
        if (end.n == x.n) {
            if (b0 == a) out.value = flow_detail::tile_factor(w_, R.with_prec(prec));
            out.correction = R.to_double();
            return out;
        }
        Mp l0 = ft_.tile(b0) - x.u;
        if (b0 == a) out.value += flow_detail::tile_factor(w_, l0);
        BigInt lo = x.n + 1;
        BigInt M = end.n - lo;
        auto pop = ft_.pop(lo, end.n);
        if (M > 0) {
            out.full_tiles = M;
            std::complex<double> E;
            if (w_.is_zero()) E = pop[a].get_d();
            else {
                E = ws_.window(lo, M)[a];
                // Window sums carry inclusive phases on non-unit roofs.
                if (!unit_) E /= flow_detail::phase(w_, ft_.tile(a));
            }
            out.value += flow_detail::phase(w_, l0) * flow_detail::tile_factor(w_, ft_.tile(a)) * E;
        }
        Letter b1 = ft_.letter(end.n);
        if (b1 == a && end.u.sign() > 0) {
            Mp D = l0 + ft_.length(pop);
            out.value += flow_detail::phase(w_, D) * flow_detail::tile_factor(w_, end.u);
        }
        out.correction = l0.to_double() + end.u.to_double();
        return out;
    }

private:
    const FlowTiling& ft_;
    Frequency w_;
    WindowSums ws_;
    bool unit_;
};

inline TwistedIntegral twisted_ergodic_integral(const FlowTiling& ft, const FlowPoint& x, Letter a, const Frequency& w,
                                                const Mp& R) {
    TwistedIntegrator ti(ft, w);
    return ti.integral(x, a, R);
}

/// The integral from the start of a legal word over its full tiling length |word|_s.
inline std::complex<double> twisted_word_integral(const SuspensionFlow& f, const Word& word, Letter a,
                                                  const Frequency& w) {
    require(static_cast<int>(a) < f.zeta.size(), "letter out of range");
    FixedPoint fp(f.zeta);
    Decomposition d = prefix_suffix_decomposition(fp, word);
    Mp sa = f.roof.values(256)[a];
    if (w.is_zero()) {
        long cnt = static_cast<long>(std::count(word.begin(), word.end(), a));
        return static_cast<double>(cnt) * sa.to_double();
    }
    WindowSums ws(fp, w, &f.roof);
    std::complex<double> E = ws.phi(d)[a];
    if (!f.roof.is_unit()) E /= flow_detail::phase(w, sa);
    return flow_detail::tile_factor(w, sa) * E;
}

struct FlowProductBound {
    double bound = 0.0;
    double product = 1.0;
    double prefactor = 0.0; ///< Cdd (max s / min s)^2 + 2 max s
    double C2_flow = 0.0;   ///< C2 + log_theta(2 max s) + 1
    int factors = 0;
};

/**
 * Bound on |S_R^{(x,t)}(1_{X_a}, omega)| valid for every point of the flow:
 * prefactor * R * prod_{k < floor(log_theta R - C2_flow)} (1 - c1 ||omega |Z^k(v)|_s||^2).
 * @p k comes from dioph_constants(zeta); lengths are tiling lengths.
 */
inline FlowProductBound flow_product_bound(const DiophConstants& k, const Roof& roof, const Frequency& w, double R) {
    require(R > 0.0, "R must be > 0");
    require(roof.size() == k.Z.size(), "roof dimension mismatch");
    double smax = roof.max(), smin = roof.min();
    FlowProductBound b;
    b.prefactor = k.Cdd * (smax / smin) * (smax / smin) + 2.0 * smax;
    b.C2_flow = k.C2 + spec_detail::log_base(2.0 * smax, k.theta) + 1.0;
    double e = std::floor(spec_detail::log_base(R, k.theta) - b.C2_flow);
    int n = e < 0 ? 0 : static_cast<int>(e);
    b.factors = n;
    if (!w.is_zero() && n > 0) {
        Hierarchy h(k.Z);
        double logp = 0.0;
        for (double x : return_word_distances(h, k.v, w, n, &roof)) logp += std::log1p(-k.c1_uniform * x * x);
        b.product = std::exp(logp);
    }
    b.bound = b.prefactor * R * b.product;
    return b;
}

struct LogHolderRow {
    double omega = 0.0;
    double r = 0.0;
    double R = 0.0;        ///< 1 / (2r)
    bool in_regime = false;
    double bound = 0.0;    ///< pi^2 C_B^2 / 4 (log_theta(1/(2r)))^{-gamma}
    double fejer = 0.0;    ///< pi^2 G_R / (4R) from sampled twisted integrals
};

struct LogHolderCertificate {
    IntPoly minpoly;                   ///< minimal polynomial of theta_Z
    double theta_Z = 0.0;
    double c1 = 0.0;
    double alpha = 0.0;                ///< from theta_Z
    std::optional<double> alpha_theta; ///< same constant for theta of zeta
    double gamma = 0.0;                ///< 2 c1 alpha
    double K_flow = 0.0;
    double C2_flow = 0.0;
    double C_B = 0.0;                  ///< K_flow 2^{c1 alpha} max_omega C_omega
    std::vector<double> C_omega;       ///< max_N prod_{k<N} (...) N^{c1 alpha}
    double R0 = 0.0;
    double r0 = 0.0;
    int N_max = 0;
    std::vector<LogHolderRow> rows;
};

namespace flow_detail {

inline AlgebraicInteger pf_algebraic(const Substitution& z) {
    return AlgebraicInteger::from_poly(largest_root_minimal_polynomial(charpoly(substitution_matrix(z))));
}

/// Evenly spaced points along the fixed-point orbit, spacing golden * span.
inline std::vector<FlowPoint> orbit_anchors(const FlowTiling& ft, double span, int count) {
    std::vector<FlowPoint> out;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < count; ++i) out.push_back(ft.locate(Mp(ft.prec(), (i + 1) * g * span)));
    return out;
}

} // namespace flow_detail

/**
 * Log-Hölder modulus for sigma_f, f = 1_{X_a}, on a self-similar flow with
 * |omega| in [1/B, B]. The product constants C_omega are fitted on the
 * supplied omega grid up to the largest level the r grid needs.
 */
inline LogHolderCertificate log_holder_certificate(const SuspensionFlow& f, double B, const std::vector<Frequency>& omegas,
                                                   const std::vector<double>& r_grid, Letter a = 0, int samples = 16) {
    require(f.self_similar, "log-Hölder certificate needs the self-similar roof");
    require(B >= 1.0, "B must be >= 1");
    require(!omegas.empty() && !r_grid.empty(), "empty grid");
    require(static_cast<int>(a) < f.zeta.size(), "letter out of range");
    for (const auto& w : omegas) {
        double x = std::abs(w.to_double());
        if (x < 1.0 / B || x > B) fail(ErrorKind::InvalidArgument, "omega " + w.str() + " outside [1/B, B]");
    }
    for (double r : r_grid) require(r > 0.0 && r < 0.5, "r must lie in (0, 1/2)");
    DiophConstants k = dioph_constants(f.zeta);
    LogHolderCertificate c;
    AlgebraicInteger tz = AlgebraicInteger::from_poly(
        largest_root_minimal_polynomial(charpoly(substitution_matrix(k.Z))));
    c.minpoly = tz.poly();
    c.theta_Z = k.theta;
    PropAlgConstants pa = prop_alg_constants(tz);
    c.alpha = pa.alpha;
    try {
        c.alpha_theta = prop_alg_constants(flow_detail::pf_algebraic(f.zeta)).alpha;
    } catch (const Error&) {
        c.alpha_theta.reset();
    }
    c.c1 = k.c1_uniform;
    c.gamma = 2.0 * c.c1 * c.alpha;
    FlowProductBound b0 = flow_product_bound(k, f.roof, Frequency(Rational(0)), 1.0);
    c.K_flow = b0.prefactor;
    c.C2_flow = b0.C2_flow;
    // N(R) = floor(log_theta R - C2_flow) >= log_theta R / 2 once log_theta R >= 2 (C2_flow + 1).
    double lr0 = 2.0 * (std::max(c.C2_flow, 0.0) + 1.0);
    c.R0 = std::pow(k.theta, lr0);
    c.r0 = 1.0 / (2.0 * c.R0);
    int Nmax = 1;
    for (double r : r_grid) {
        double e = std::floor(spec_detail::log_base(1.0 / (2.0 * r), k.theta) - c.C2_flow);
        Nmax = std::max(Nmax, static_cast<int>(std::max(e, 1.0)));
    }
    c.N_max = Nmax;
    double ca = c.c1 * c.alpha;
    Hierarchy h(k.Z);
    double cmax = 0.0;
    for (const auto& w : omegas) {
        auto d = return_word_distances(h, k.v, w, Nmax, &f.roof);
        double logp = 0.0, best = 0.0;
        for (int N = 1; N <= Nmax; ++N) {
            logp += std::log1p(-c.c1 * d[N - 1] * d[N - 1]);
            best = std::max(best, std::exp(logp) * std::pow(static_cast<double>(N), ca));
        }
        c.C_omega.push_back(best);
        cmax = std::max(cmax, best);
    }
    c.C_B = c.K_flow * std::pow(2.0, ca) * cmax;
    FlowTiling ft(f);
    for (const auto& w : omegas) {
        TwistedIntegrator ti(ft, w);
        for (double r : r_grid) {
            LogHolderRow row;
            row.omega = w.to_double();
            row.r = r;
            row.R = 1.0 / (2.0 * r);
            row.in_regime = r <= c.r0;
            double lg = spec_detail::log_base(row.R, k.theta);
            row.bound = lg > 1.0 ? variation_bound(c.C_B * c.C_B, [&](double x) {
                return std::pow(spec_detail::log_base(1.0 / x, k.theta), -c.gamma);
            }, r, 2.0)
                                 : std::numeric_limits<double>::infinity();
            Mp R(ft.prec(), row.R);
            double G = 0.0;
            for (const auto& p : flow_detail::orbit_anchors(ft, row.R, samples)) G += std::norm(ti.integral(p, a, R).value);
            G /= samples * row.R;
            row.fejer = M_PI * M_PI * G / (4.0 * row.R);
            c.rows.push_back(row);
        }
    }
    return c;
}

/// Per-letter polynomial profiles psi_j(t) = sum_i c_{j,i} t^i on [0, s_j].
struct Profile {
    std::vector<std::vector<double>> coeffs;

    static Profile constant(const std::vector<double>& v) {
        Profile p;
        for (double x : v) p.coeffs.push_back({x});
        return p;
    }

    int size() const { return static_cast<int>(coeffs.size()); }

    bool is_constant() const {
        for (const auto& c : coeffs)
            for (size_t i = 1; i < c.size(); ++i)
                if (c[i] != 0.0) return false;
        return true;
    }

    double value(Letter j, double t) const {
        double r = 0.0;
        const auto& c = coeffs[j];
        for (size_t i = c.size(); i-- > 0;) r = r * t + c[i];
        return r;
    }

    /// int_a^b psi_j.
    double integral(Letter j, double a, double b) const {
        auto F = [&](double t) {
            double r = 0.0;
            const auto& c = coeffs[j];
            for (size_t i = c.size(); i-- > 0;) r = r * t + c[i] / static_cast<double>(i + 1);
            return r * t;
        };
        return F(b) - F(a);
    }

    double sup(const std::vector<double>& s) const {
        double m = 0.0;
        for (int j = 0; j < size(); ++j) {
            double bound = 0.0;
            for (size_t i = 0; i < coeffs[j].size(); ++i) bound += std::abs(coeffs[j][i]) * std::pow(s[j], static_cast<double>(i));
            m = std::max(m, bound);
        }
        return m;
    }
};

/// Second eigenvalue data: S e2 = theta2 e2, S^t e2* = theta2 e2*, max|e2| = 1, <e2, e2*> = 1.
struct SecondEigen {
    double theta = 0.0;
    double theta2 = 0.0;
    bool eigen1 = false; ///< theta > theta2 > |theta_j| for the remaining j, theta2 > 1
    std::vector<double> r; ///< letter frequencies, sum 1
    std::vector<double> e2, e2_star;
};

namespace flow_detail {

/// Null vector of A - lambda I (rank n - 1), by full-pivot elimination.
inline std::vector<long double> null_vector(const BigMatrix& A, long double lambda, bool transpose) {
    int n = A.rows();
    std::vector<std::vector<long double>> M(static_cast<size_t>(n), std::vector<long double>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            M[i][j] = static_cast<long double>((transpose ? A(j, i) : A(i, j)).get_d());
            if (i == j) M[i][j] -= lambda;
        }
    std::vector<int> col(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) col[j] = j;
    for (int k = 0; k < n - 1; ++k) {
        int pi = k, pj = k;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j)
                if (std::abs(M[i][j]) > std::abs(M[pi][pj])) { pi = i; pj = j; }
        std::swap(M[k], M[pi]);
        for (auto& row : M) std::swap(row[k], row[pj]);
        std::swap(col[k], col[pj]);
        for (int i = k + 1; i < n; ++i) {
            long double f = M[i][k] / M[k][k];
            for (int j = k; j < n; ++j) M[i][j] -= f * M[k][j];
        }
    }
    std::vector<long double> y(static_cast<size_t>(n), 0.0L);
    y[n - 1] = 1.0L;
    for (int k = n - 2; k >= 0; --k) {
        long double s = 0.0L;
        for (int j = k + 1; j < n; ++j) s += M[k][j] * y[j];
        y[k] = -s / M[k][k];
    }
    std::vector<long double> x(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) x[col[j]] = y[j];
    return x;
}

} // namespace flow_detail

inline SecondEigen second_eigen(const Substitution& z) {
    BigMatrix S = substitution_matrix(z);
    PerronData pd = perron_data(S);
    SecondEigen e;
    e.theta = pd.theta_d;
    e.r = pd.r_d;
    int m = z.size();
    if (m < 2) fail(ErrorKind::WrongClass, "one letter: no second eigenvalue");
    std::vector<const RootBox*> rest;
    bool skipped = false;
    for (const auto& rb : pd.roots.roots) {
        if (!skipped && rb.real && std::abs(rb.re.to_double() - e.theta) < 1e-9 * e.theta) {
            skipped = true;
            continue;
        }
        rest.push_back(&rb);
    }
    std::stable_sort(rest.begin(), rest.end(),
                     [](const RootBox* x, const RootBox* y) { return x->modulus_double() > y->modulus_double(); });
    if (rest.empty()) fail(ErrorKind::WrongClass, "no second eigenvalue");
    const RootBox& t2 = *rest[0];
    double md = t2.modulus_double();
    if (!t2.real) fail(ErrorKind::WrongClass, "second eigenvalue is not real");
    if (rest.size() > 1 && rest[1]->modulus_double() > md * (1.0 - 1e-9))
        fail(ErrorKind::WrongClass, "second eigenvalue modulus is not simple");
    if (!(t2.modulus().lo() > Mp(64, 1.0))) fail(ErrorKind::WrongClass, "|theta_2| must exceed 1");
    e.theta2 = t2.re.to_double();
    // Multiplicity in the characteristic polynomial itself.
    IntPoly d = pd.charpoly.derivative();
    double dv = 0.0, scale = 0.0;
    for (int i = d.degree(); i >= 0; --i) {
        dv = dv * e.theta2 + d.coeff(i).get_d();
        scale = scale * std::abs(e.theta2) + std::abs(d.coeff(i).get_d());
    }
    if (std::abs(dv) < 1e-9 * scale) fail(ErrorKind::WrongClass, "second eigenvalue is repeated");
    e.eigen1 = e.theta2 > 1.0;
    auto v = flow_detail::null_vector(S, e.theta2, false);
    auto w = flow_detail::null_vector(S, e.theta2, true);
    long double mx = 0.0L;
    int first = -1;
    for (int i = 0; i < m; ++i) {
        mx = std::max(mx, std::abs(v[i]));
        if (first < 0 && std::abs(v[i]) > 1e-12L) first = i;
    }
    long double sg = v[first] < 0 ? -1.0L : 1.0L;
    long double dot = 0.0L;
    for (int i = 0; i < m; ++i) {
        v[i] = sg * v[i] / mx;
        dot += v[i] * w[i];
    }
    for (int i = 0; i < m; ++i) {
        e.e2.push_back(static_cast<double>(v[i]));
        e.e2_star.push_back(static_cast<double>(w[i] / dot));
    }
    return e;
}

struct CocycleEvaluation {
    double t = 0.0;
    int k_used = 0;
    double value = 0.0;
    double error_bound = 0.0;
    int boundary_tiles = 0;
};

/**
 * Phi_2^+ on the fixed-point tiling: a level-k subtile of type j weighs
 * theta_2^{-k} (e2*)_j. Straddling tiles are subdivided down to k_levels;
 * what remains is bounded by theta_2^{-k} 2 L max|e2*| / (|theta_2| - 1).
 */
class Cocycle {
public:
    explicit Cocycle(const SuspensionFlow& f, long prec = 256) : ft_(f, prec), eig_(second_eigen(f.zeta)) {
        require(f.self_similar, "cocycle needs the self-similar roof");
        const Substitution& Z = ft_.fixed_point().sub();
        int p = ft_.fixed_point().power();
        power_ = p;
        theta_z_ = std::pow(eig_.theta, p);
        theta2_z_ = std::pow(eig_.theta2, p);
        long L = 0;
        for (int b = 0; b < Z.size(); ++b) L = std::max(L, static_cast<long>(Z.image(static_cast<Letter>(b)).size()));
        double emax = 0.0;
        for (double x : eig_.e2_star) emax = std::max(emax, std::abs(x));
        L_ = static_cast<double>(L);
        tail_ = 2.0 * static_cast<double>(L) * emax / (std::abs(theta2_z_) - 1.0);
        for (const auto& x : ft_.flow().roof.values_d()) s_.push_back(x);
        max_levels_ = static_cast<int>(std::floor(40.0 * std::log(2.0) / std::log(theta_z_)));
    }

    const FlowTiling& tiling() const { return ft_; }
    const SecondEigen& eigen() const { return eig_; }
    int power() const { return power_; }
    double theta_z() const { return theta_z_; }
    double theta2_z() const { return theta2_z_; }
    double alpha() const { return std::log(std::abs(eig_.theta2)) / std::log(eig_.theta); }
    int max_levels() const { return max_levels_; }

    /**
     * C1 with |Phi_2^+(t)| <= C1 max(1, t^alpha): at most 2L supertiles per
     * level below log_theta(t / min s) plus two straddling tiles.
     */
    double growth_constant() const {
        double emax = 0.0;
        for (double x : eig_.e2_star) emax = std::max(emax, std::abs(x));
        double t2 = std::abs(theta2_z_);
        double smin = *std::min_element(s_.begin(), s_.end());
        return 2.0 * L_ * emax * t2 / (t2 - 1.0) * std::max(1.0, std::pow(smin, -alpha())) + 2.0 * tail_;
    }

    CocycleEvaluation eval(const FlowPoint& x, double t, int k_levels) const {
        return eval(x, Mp(ft_.prec(), t), k_levels);
    }

    /// Phi_2^+ of the time interval [0, t] starting at x.
    CocycleEvaluation eval(const FlowPoint& x, const Mp& tm, int k_levels) const {
        double t = tm.to_double();
        require(tm.sign() >= 0, "t must be >= 0");
        require(k_levels >= 0, "k_levels must be >= 0");
        if (k_levels > max_levels_)
            fail(ErrorKind::PrecisionExhausted, "k_levels above " + std::to_string(max_levels_) + " exceeds double resolution");
        CocycleEvaluation out;
        out.t = t;
        out.k_used = k_levels;
        if (tm.is_zero()) return out;
        Mp P = ft_.position(x.n);
        FlowPoint end = ft_.locate(P + x.u + tm);
        Letter b0 = ft_.letter(x.n);
        double u0 = x.u.to_double();
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (end.n == x.n) {
            partial(b0, 0, u0, end.u.to_double(), k_levels, out);
            return out;
        }
        partial(b0, 0, u0, inf, k_levels, out);
        auto pop = ft_.pop(x.n + 1, end.n);
        for (size_t j = 0; j < pop.size(); ++j) out.value += pop[j].get_d() * eig_.e2_star[j];
        if (end.u.sign() > 0) partial(ft_.letter(end.n), 0, -inf, end.u.to_double(), k_levels, out);
        return out;
    }

    CocycleEvaluation eval_at(const Mp& X, double t, int k_levels) const { return eval(ft_.locate(X), t, k_levels); }

private:
    // [a, b] in the coordinates of a tile of type j rescaled to length s_j.
    void partial(Letter j, int depth, double a, double b, int k_levels, CocycleEvaluation& out) const {
        double sj = s_[j];
        if (b <= 0.0 || a >= sj || a >= b) return;
        double w = std::pow(theta2_z_, -depth);
        if (a <= 0.0 && b >= sj) {
            out.value += w * eig_.e2_star[j];
            return;
        }
        if (depth == k_levels) {
            out.error_bound += std::abs(w) * tail_;
            ++out.boundary_tiles;
            return;
        }
        double c = 0.0;
        for (Letter i : ft_.fixed_point().sub().image(j)) {
            double li = s_[i] / theta_z_;
            partial(i, depth + 1, (a - c) * theta_z_, (b - c) * theta_z_, k_levels, out);
            c += li;
        }
    }

    FlowTiling ft_;
    SecondEigen eig_;
    int power_ = 1;
    double theta_z_ = 0.0, theta2_z_ = 0.0, tail_ = 0.0, L_ = 0.0;
    std::vector<double> s_;
    int max_levels_ = 0;
};

inline CocycleEvaluation cocycle_phi2(const Cocycle& c, const FlowPoint& x, double t, int k_levels) {
    return c.eval(x, t, k_levels);
}

inline CocycleEvaluation cocycle_phi2(const Cocycle& c, const FlowPoint& x, const Mp& t, int k_levels) {
    return c.eval(x, t, k_levels);
}

/// m_{Phi_2^-}(f) = sum_j (e2)_j int_0^{s_j} psi_j.
inline double m_phi2_minus(const SecondEigen& e, const Roof& roof, const Profile& psi) {
    require(psi.size() == roof.size(), "one profile per letter");
    double m = 0.0;
    for (int j = 0; j < psi.size(); ++j) m += e.e2[j] * psi.integral(static_cast<Letter>(j), 0.0, roof.values_d()[j]);
    return m;
}

inline double m_phi2_minus(const SuspensionFlow& f, const Profile& psi) {
    return m_phi2_minus(second_eigen(f.zeta), f.roof, psi);
}

namespace flow_detail {

inline void require_mean_zero(const SecondEigen& e, const Roof& roof, const Profile& psi) {
    require(psi.size() == roof.size(), "one profile per letter");
    double mean = 0.0, scale = 0.0;
    for (int j = 0; j < psi.size(); ++j) {
        double I = psi.integral(static_cast<Letter>(j), 0.0, roof.values_d()[j]);
        mean += e.r[j] * I;
        scale += std::abs(I);
    }
    if (std::abs(mean) > 1e-12 * std::max(scale, 1e-300))
        fail(ErrorKind::NotMeanZero, "f has mean " + std::to_string(mean));
}

} // namespace flow_detail

/// S(f, x, t) = int_0^t f(h_tau x) dtau for a cylindrical f, by exact piecewise integration.
inline double ergodic_integral(const FlowTiling& ft, const Profile& psi, const FlowPoint& x, double t) {
    require(t >= 0.0, "t must be >= 0");
    if (t == 0.0) return 0.0;
    Mp P = ft.position(x.n);
    FlowPoint end = ft.locate(P + x.u + Mp(ft.prec(), t));
    Letter b0 = ft.letter(x.n);
    double u0 = x.u.to_double();
    if (end.n == x.n) return psi.integral(b0, u0, end.u.to_double());
    const auto& s = ft.flow().roof.values_d();
    double S = psi.integral(b0, u0, s[b0]);
    auto pop = ft.pop(x.n + 1, end.n);
    for (size_t j = 0; j < pop.size(); ++j) S += pop[j].get_d() * psi.integral(static_cast<Letter>(j), 0.0, s[j]);
    S += psi.integral(ft.letter(end.n), 0.0, end.u.to_double());
    return S;
}

struct DecompositionRow {
    double t = 0.0;
    double S = 0.0;
    double phi2 = 0.0;
    double phi2_error = 0.0;
    double main = 0.0;
    double remainder = 0.0;
    double exponent = 0.0; ///< log|R| / log t for t > 1, else 0
};

struct ErgodicDecomposition {
    double m_minus = 0.0;
    double alpha = 0.0;
    double max_exponent = -std::numeric_limits<double>::infinity(); ///< over rows with t > 1
    std::vector<DecompositionRow> rows;
};

/// S(f, x, t) = Phi_2^+(t) m_{Phi_2^-}(f) + R(t) along a grid of times.
inline ErgodicDecomposition ergodic_decomposition_check(const Cocycle& c, const Profile& psi, const FlowPoint& x,
                                                        const std::vector<double>& t_grid, int k_levels = -1) {
    const SecondEigen& e = c.eigen();
    if (!e.eigen1) fail(ErrorKind::WrongClass, "needs theta > theta_2 > |theta_j|, theta_2 > 1 real");
    const Roof& roof = c.tiling().flow().roof;
    flow_detail::require_mean_zero(e, roof, psi);
    if (k_levels < 0) k_levels = c.max_levels();
    ErgodicDecomposition out;
    out.m_minus = m_phi2_minus(e, roof, psi);
    out.alpha = c.alpha();
    for (double t : t_grid) {
        DecompositionRow row;
        row.t = t;
        row.S = ergodic_integral(c.tiling(), psi, x, t);
        auto ce = c.eval(x, t, k_levels);
        row.phi2 = ce.value;
        row.phi2_error = ce.error_bound;
        row.main = ce.value * out.m_minus;
        row.remainder = row.S - row.main;
        if (t > 1.0) {
            row.exponent = std::log(std::max(std::abs(row.remainder), 1e-300)) / std::log(t);
            out.max_exponent = std::max(out.max_exponent, row.exponent);
        }
        out.rows.push_back(row);
    }
    return out;
}

struct ZeroScaling {
    std::vector<int> N;
    std::vector<double> T, value, ratio;
    double alpha = 0.0;
    double m_minus = 0.0;
    double spread = 0.0;     ///< (max - min) / mean of the ratios
    double half_width = 0.0; ///< truncation |t| <= half_width T
    double truncation = 0.0; ///< bound on the dropped Gaussian mass relative to T, per window
    int windows = 0;
};

namespace flow_detail {

inline constexpr double kGaussLegendre8[8][2] = {
    {-0.9602898564975363, 0.1012285362903763}, {-0.7966664774136267, 0.2223810344533745},
    {-0.5255324099163290, 0.3137066458778873}, {-0.1834346424956498, 0.3626837833783620},
    {0.1834346424956498, 0.3626837833783620},  {0.5255324099163290, 0.3137066458778873},
    {0.7966664774136267, 0.2223810344533745},  {0.9602898564975363, 0.1012285362903763}};

} // namespace flow_detail

/**
 * T^{-2} E|int f(h_t x) psihat(t/T) dt|^2 for T = theta^N, psihat(t) =
 * amplitude e^{-pi t^2}. Windows sit at tiling coordinates T (w + i) along
 * the fixed point, w the truncation half-width, and the ratios divide by
 * T^{2 alpha - 2}.
 */
inline ZeroScaling zero_scaling_experiment(const Cocycle& c, const Profile& psi, int N_lo, int N_hi, int windows = 32,
                                           double amplitude = 1.0, int threads = 1) {
    const SecondEigen& e = c.eigen();
    if (!e.eigen1) fail(ErrorKind::WrongClass, "needs theta > theta_2 > |theta_j|, theta_2 > 1 real");
    const FlowTiling& ft = c.tiling();
    const Roof& roof = ft.flow().roof;
    flow_detail::require_mean_zero(e, roof, psi);
    require(N_lo >= 1 && N_lo <= N_hi, "bad N range");
    require(windows >= 1, "windows must be >= 1");
    ZeroScaling out;
    out.m_minus = m_phi2_minus(e, roof, psi);
    double scale = 0.0;
    for (int j = 0; j < psi.size(); ++j) scale += std::abs(psi.integral(static_cast<Letter>(j), 0.0, roof.values_d()[j]));
    if (std::abs(out.m_minus) <= 1e-12 * std::max(scale, 1e-300)) fail(ErrorKind::DegenerateF, "m_{Phi_2^-}(f) = 0");
    out.alpha = c.alpha();
    out.windows = windows;
    const double hw = std::sqrt(12.0 * std::log(10.0) / M_PI);
    out.half_width = hw;
    const auto& s = roof.values_d();
    double smin = roof.min();
    out.truncation = std::abs(amplitude) * psi.sup(s) * std::erfc(std::sqrt(M_PI) * hw);
    bool constant = psi.is_constant();
    threads = std::max(1, threads);
    for (int N = N_lo; N <= N_hi; ++N) {
        double T = std::pow(e.theta, N);
        double W = hw * T;
        double top = T * (2.0 * hw + windows) + 2.0;
        size_t len = static_cast<size_t>(std::ceil(top / smin)) + 4;
        Word x = ft.fixed_point().prefix(len);
        std::vector<double> I(static_cast<size_t>(windows), 0.0);
        auto work = [&](int i) {
            double X = T * (hw + i);
            FlowPoint p = ft.locate(Mp(ft.prec(), X - W));
            size_t n = static_cast<size_t>(p.n.get_ui());
            double a = -W - p.u.to_double();
            double sum = 0.0;
            const double k = std::sqrt(M_PI) / T;
            double Fa = 0.5 * T * std::erf(k * a);
            for (; n < x.size() && a <= W; ++n) {
                Letter j = x[n];
                double b = a + s[j];
                if (constant) {
                    double Fb = 0.5 * T * std::erf(k * b);
                    sum += psi.coeffs[j][0] * (Fb - Fa);
                    Fa = Fb;
                } else {
                    double h = 0.5 * s[j], mid = a + h;
                    for (const auto& gl : flow_detail::kGaussLegendre8) {
                        double tau = mid + h * gl[0];
                        sum += h * gl[1] * psi.value(j, tau - a) * std::exp(-M_PI * (tau / T) * (tau / T));
                    }
                }
                a = b;
            }
            require(a > W, "fixed-point prefix too short for the window");
            I[static_cast<size_t>(i)] = amplitude * sum;
        };
        std::vector<std::thread> pool;
        int nt = std::min(threads, windows);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                for (int i = t; i < windows; i += nt) work(i);
            });
        for (auto& th : pool) th.join();
        double acc = 0.0;
        for (double v : I) acc += v * v;
        double value = acc / windows / (T * T);
        out.N.push_back(N);
        out.T.push_back(T);
        out.value.push_back(value);
        out.ratio.push_back(value / std::pow(T, 2.0 * out.alpha - 2.0));
    }
    double lo = *std::min_element(out.ratio.begin(), out.ratio.end());
    double hi = *std::max_element(out.ratio.begin(), out.ratio.end());
    double mean = 0.0;
    for (double r : out.ratio) mean += r;
    mean /= static_cast<double>(out.ratio.size());
    out.spread = mean > 0.0 ? (hi - lo) / mean : 0.0;
    return out;
}

} // namespace subdyn
