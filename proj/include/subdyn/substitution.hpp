#pragma once
/**
 * @file substitution.hpp
 * @brief Substitutions on {1..m}: matrices, iteration, Perron-Frobenius data,
 *        return words, fixed points and prefix-suffix decompositions.
 *
 * Letters are stored 0-based and printed 1-based.
 */

#include "subdyn/error.hpp"
#include "subdyn/numeric/interval.hpp"
#include "subdyn/numeric/matrix.hpp"
#include "subdyn/numeric/mp.hpp"
#include "subdyn/numeric/polynomial.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace subdyn {

using Letter = std::uint32_t;
using Word = std::vector<Letter>;

class Substitution {
public:
    Substitution() = default;
    Substitution(int m, std::vector<Word> images) : m_(m), images_(std::move(images)) {
        require(m_ >= 1, "alphabet size must be >= 1");
        require(static_cast<int>(images_.size()) == m_, "need exactly one image per letter");
        for (const auto& w : images_) {
            require(!w.empty(), "images must be nonempty");
            for (Letter c : w) require(static_cast<int>(c) < m_, "image uses a letter outside the alphabet");
        }
    }

    /// Images written with digits 1..9 when m <= 9, otherwise comma-separated letters.
    static Substitution parse(int m, const std::vector<std::string>& images) {
        require(static_cast<int>(images.size()) == m, "need exactly one image per letter");
        std::vector<Word> w;
        for (const auto& s : images) w.push_back(parse_word(m, s));
        return Substitution(m, std::move(w));
    }

    static Word parse_word(int m, const std::string& s) {
        Word w;
        if (m <= 9 && s.find(',') == std::string::npos) {
            for (char ch : s) {
                if (ch == ' ') continue;
                int d = ch - '0';
                if (d < 1 || d > m) fail(ErrorKind::ConfigError, "letter '" + std::string(1, ch) + "' outside 1.." + std::to_string(m));
                w.push_back(static_cast<Letter>(d - 1));
            }
        } else {
            std::stringstream ss(s);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok.empty()) continue;
                long d = std::stol(tok);
                if (d < 1 || d > m) fail(ErrorKind::ConfigError, "letter " + tok + " outside 1.." + std::to_string(m));
                w.push_back(static_cast<Letter>(d - 1));
            }
        }
        return w;
    }

    std::string format(const Word& w) const {
        std::string s;
        for (size_t i = 0; i < w.size(); ++i) {
            if (m_ > 9 && i) s += ',';
            s += std::to_string(w[i] + 1);
        }
        return s;
    }

    int size() const { return m_; }
    const Word& image(Letter a) const { return images_[a]; }
    const std::vector<Word>& images() const { return images_; }

    size_t max_image_length() const {
        size_t L = 0;
        for (const auto& w : images_) L = std::max(L, w.size());
        return L;
    }

    Word apply(const Word& v) const {
        Word out;
        for (Letter c : v) out.insert(out.end(), images_[c].begin(), images_[c].end());
        return out;
    }

    Substitution power(int p) const {
        require(p >= 1, "power must be >= 1");
        std::vector<Word> im;
        for (int a = 0; a < m_; ++a) {
            Word w{static_cast<Letter>(a)};
            for (int k = 0; k < p; ++k) w = apply(w);
            im.push_back(std::move(w));
        }
        return Substitution(m_, std::move(im));
    }

    friend bool operator==(const Substitution& a, const Substitution& b) {
        return a.m_ == b.m_ && a.images_ == b.images_;
    }

private:
    int m_ = 0;
    std::vector<Word> images_;
};

/// S(i,j) = number of occurrences of letter i in the image of j.
inline BigMatrix substitution_matrix(const Substitution& z) {
    int m = z.size();
    BigMatrix S(m, m);
    for (int j = 0; j < m; ++j)
        for (Letter i : z.image(static_cast<Letter>(j))) S(static_cast<int>(i), j) += 1;
    return S;
}

struct Primitivity {
    bool primitive = false;
    int exponent = 0; ///< smallest n with S^n > 0
};

inline Primitivity is_primitive(const BigMatrix& S) {
    int m = S.rows();
    std::vector<char> P(static_cast<size_t>(m) * m), B(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) B[i * m + j] = P[i * m + j] = S(i, j) > 0;
    int bound = (m - 1) * m + 1;
    for (int n = 1; n <= bound; ++n) {
        if (std::all_of(P.begin(), P.end(), [](char c) { return c != 0; })) return {true, n};
        std::vector<char> Q(static_cast<size_t>(m) * m, 0);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k)
                if (P[i * m + k])
                    for (int j = 0; j < m; ++j)
                        if (B[k * m + j]) Q[i * m + j] = 1;
        P = std::move(Q);
    }
    return {false, 0};
}

/// Cached powers S^k; column b of S^k is the letter count vector of zeta^k(b).
class Hierarchy {
public:
    Hierarchy() = default;
    explicit Hierarchy(const Substitution& z) : z_(z), state_(std::make_shared<State>()) {
        state_->pow.push_back(BigMatrix::identity(z.size()));
        state_->S = substitution_matrix(z);
    }

    const Substitution& sub() const { return z_; }
    const BigMatrix& matrix() const { return state_->S; }

    const BigMatrix& power(int k) const {
        require(k >= 0, "negative level");
        std::lock_guard<std::mutex> lock(state_->mu);
        while (static_cast<int>(state_->pow.size()) <= k) state_->pow.push_back(state_->S * state_->pow.back());
        return state_->pow[static_cast<size_t>(k)];
    }

    BigInt length(int k, Letter b) const { return power(k).column_sum(static_cast<int>(b)); }

    std::vector<BigInt> lengths(int k) const {
        const BigMatrix& P = power(k);
        std::vector<BigInt> out;
        for (int b = 0; b < z_.size(); ++b) out.push_back(P.column_sum(b));
        return out;
    }

    std::vector<BigInt> pop(int k, Letter b) const { return power(k).column(static_cast<int>(b)); }

    /// Letter counts of zeta^k(w).
    std::vector<BigInt> pop(int k, const Word& w) const {
        const BigMatrix& P = power(k);
        std::vector<BigInt> out(static_cast<size_t>(z_.size()), BigInt(0));
        for (Letter c : w)
            for (int i = 0; i < z_.size(); ++i) out[i] += P(i, static_cast<int>(c));
        return out;
    }

    BigInt length(int k, const Word& w) const {
        BigInt s = 0;
        for (Letter c : w) s += length(k, c);
        return s;
    }

private:
    struct State {
        std::mutex mu;
        BigMatrix S;
        std::deque<BigMatrix> pow;
    };
    Substitution z_;
    std::shared_ptr<State> state_;
};

/// |zeta^n(b)| for every b, exactly.
inline std::vector<BigInt> lengths_at(const Substitution& z, int n) {
    return Hierarchy(z).lengths(n);
}

inline Word iterate_word(const Substitution& z, Letter a, int n, size_t max_len) {
    Hierarchy h(z);
    BigInt len = h.length(n, a);
    if (len > BigInt(static_cast<unsigned long>(max_len)))
        fail(ErrorKind::BudgetExceeded, "|zeta^" + std::to_string(n) + "| = " + len.get_str() + " exceeds the budget");
    Word w{a};
    for (int k = 0; k < n; ++k) w = z.apply(w);
    return w;
}

inline std::vector<BigInt> abelianization(const Word& v, int m) {
    std::vector<BigInt> c(static_cast<size_t>(m), BigInt(0));
    for (Letter x : v) c[x] += 1;
    return c;
}

inline double tiling_length(const Word& v, const std::vector<double>& s) {
    double t = 0.0;
    for (Letter x : v) t += s[x];
    return t;
}

struct PerronData {
    Interval theta;
    double theta_d = 0.0;
    std::vector<Mp> r, l;           ///< S r = theta r, l S = theta l, sum r = 1, <r,l> = 1
    std::vector<double> r_d, l_d;
    double residual = 0.0;          ///< max of |S r - theta r| and |l S - theta l|
    IntPoly charpoly;
    RootSet roots;                  ///< certified roots of the squarefree part of the charpoly
};

namespace subst_detail {

/// Solves A x = b by Gaussian elimination with partial pivoting at A's precision.
inline std::vector<Mp> solve(std::vector<std::vector<Mp>> A, std::vector<Mp> b) {
    int n = static_cast<int>(A.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (mp_abs(A[i][col]) > mp_abs(A[piv][col])) piv = i;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        if (A[col][col].is_zero()) fail(ErrorKind::NotPrimitive, "singular eigenvector system");
        for (int i = col + 1; i < n; ++i) {
            Mp f = A[i][col] / A[col][col];
            for (int j = col; j < n; ++j) A[i][j] = A[i][j] - f * A[col][j];
            b[i] = b[i] - f * b[col];
        }
    }
    std::vector<Mp> x(static_cast<size_t>(n), Mp(b[0].prec()));
    for (int i = n - 1; i >= 0; --i) {
        Mp s = b[i];
        for (int j = i + 1; j < n; ++j) s = s - A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

} // namespace subst_detail

/**
 * Perron-Frobenius eigenvalue and eigenvectors of a primitive matrix. theta is
 * certified as the largest real root of the characteristic polynomial; the
 * eigenvectors are solved at @p bits + 64 bits and their residual reported.
 */
inline PerronData perron_data(const BigMatrix& S, long bits = 128) {
    if (!is_primitive(S).primitive) fail(ErrorKind::NotPrimitive, "matrix is not primitive");
    int m = S.rows();
    PerronData d;
    d.charpoly = charpoly(S);
    IntPoly sq = squarefree_part(d.charpoly);
    d.roots = certify_roots(sq);
    int best = -1;
    for (int k = 0; k < static_cast<int>(d.roots.roots.size()); ++k)
        if (d.roots.roots[k].real && (best < 0 || d.roots.roots[k].re > d.roots.roots[best].re)) best = k;
    if (best < 0) fail(ErrorKind::NotPrimitive, "no real eigenvalue found");
    d.theta = refine_real_root(sq, d.roots.roots[best].real_interval(), bits + 32);
    d.theta_d = d.theta.mid().to_double();
    long prec = bits + 64;
    Mp th = d.theta.mid().with_prec(prec);

    auto eigvec = [&](bool transpose, const std::vector<Mp>* norm) {
        std::vector<std::vector<Mp>> A(static_cast<size_t>(m), std::vector<Mp>(static_cast<size_t>(m), Mp(prec)));
        std::vector<Mp> b(static_cast<size_t>(m), Mp(prec));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                A[i][j] = Mp(prec, transpose ? S(j, i) : S(i, j));
                if (i == j) A[i][j] = A[i][j] - th;
            }
        for (int j = 0; j < m; ++j) A[m - 1][j] = norm ? (*norm)[j] : Mp(prec, 1.0);
        b[m - 1] = Mp(prec, 1.0);
        return subst_detail::solve(A, b);
    };
    d.r = eigvec(false, nullptr);
    d.l = eigvec(true, &d.r);
    double res = 0.0;
    for (int i = 0; i < m; ++i) {
        Mp a(prec), b(prec);
        for (int j = 0; j < m; ++j) {
            a = a + Mp(prec, S(i, j)) * d.r[j];
            b = b + Mp(prec, S(j, i)) * d.l[j];
        }
        a = a - th * d.r[i];
        b = b - th * d.l[i];
        res = std::max({res, std::abs(a.to_double()), std::abs(b.to_double())});
    }
    d.residual = res;
    for (auto& x : d.r) d.r_d.push_back(x.to_double());
    for (auto& x : d.l) d.l_d.push_back(x.to_double());
    return d;
}

/// Fixed point of a power of zeta: zeta^p(a) starts with a.
class FixedPoint {
public:
    FixedPoint() = default;
    explicit FixedPoint(const Substitution& z) {
        int m = z.size();
        int best_a = -1, best_p = 0;
        for (int a = 0; a < m; ++a) {
            Letter x = static_cast<Letter>(a);
            for (int p = 1; p <= m; ++p) {
                x = z.image(x)[0];
                if (x == static_cast<Letter>(a)) {
                    if (best_a < 0) { best_a = a; best_p = p; }
                    break;
                }
            }
            if (best_a >= 0) break;
        }
        require(best_a >= 0, "no letter starts a fixed point");
        power_ = best_p;
        letter_ = static_cast<Letter>(best_a);
        sub_ = best_p == 1 ? z : z.power(best_p);
        h_ = Hierarchy(sub_);
        if (sub_.image(letter_).size() < 2) {
            Substitution q = sub_.power(2);
            // Non-expanding first image; pass to a power where the image grows.
            int k = 1;
            while (q.image(letter_).size() < 2 && k < 64) { q = q.power(2); k *= 2; }
            require(q.image(letter_).size() >= 2, "substitution is not expanding");
            sub_ = q;
            power_ *= 2 * k;
            h_ = Hierarchy(sub_);
        }
    }

    const Substitution& sub() const { return sub_; }
    const Hierarchy& hierarchy() const { return h_; }
    int power() const { return power_; }
    Letter letter() const { return letter_; }

    /// Smallest K with |zeta'^K(a)| > n.
    int level_above(const BigInt& n) const {
        int K = 0;
        while (h_.length(K, letter_) <= n) ++K;
        return K;
    }

    Word prefix(size_t len) const {
        int K = level_above(BigInt(static_cast<unsigned long>(len)));
        Word w{letter_};
        for (int k = 0; k < K; ++k) {
            w = sub_.apply(w);
            if (w.size() > len) {
                // Only the prefix matters from here on.
                size_t keep = len;
                w.resize(std::max(keep, static_cast<size_t>(1)));
            }
        }
        w.resize(len);
        return w;
    }

    Letter letter_at(const BigInt& pos) const {
        int L = level_above(pos);
        Letter b = letter_;
        BigInt q = pos;
        while (L > 0) {
            for (Letter c : sub_.image(b)) {
                BigInt len = h_.length(L - 1, c);
                if (q < len) { b = c; break; }
                q -= len;
            }
            --L;
        }
        return b;
    }

    /// Word x[lo, hi) of the fixed point.
    Word window(const BigInt& lo, size_t len) const {
        Word w;
        w.reserve(len);
        BigInt hi = lo + BigInt(static_cast<unsigned long>(len));
        int L = level_above(hi);
        // Iterative in-order traversal restricted to [lo, hi).
        struct Frame { int level; Letter b; BigInt start; };
        std::vector<Frame> st{{L, letter_, BigInt(0)}};
        while (!st.empty()) {
            Frame f = st.back();
            st.pop_back();
            BigInt end = f.start + h_.length(f.level, f.b);
            if (end <= lo || f.start >= hi) continue;
            if (f.level == 0) { w.push_back(f.b); continue; }
            const Word& img = sub_.image(f.b);
            std::vector<Frame> kids;
            BigInt s = f.start;
            for (Letter c : img) {
                kids.push_back({f.level - 1, c, s});
                s += h_.length(f.level - 1, c);
            }
            for (auto it = kids.rbegin(); it != kids.rend(); ++it) st.push_back(*it);
        }
        return w;
    }

private:
    Substitution sub_;
    Hierarchy h_;
    int power_ = 1;
    Letter letter_ = 0;
};

/**
 * x = u_0 zeta(u_1) ... zeta^n(u_n) zeta^n(v_n) ... zeta(v_1) v_0 with u_i
 * proper suffixes and v_i proper prefixes of images. When the window sits
 * strictly inside one image at the top level, u_n is that inner factor and
 * top_interior is set.
 */
struct Decomposition {
    std::vector<Word> u, v;
    bool top_interior = false;

    int n() const { return static_cast<int>(u.size()) - 1; }

    struct Piece {
        int level;
        Word w;
    };

    std::vector<Piece> pieces() const {
        std::vector<Piece> out;
        for (int i = 0; i <= n(); ++i)
            if (!u[i].empty()) out.push_back({i, u[i]});
        for (int i = n(); i >= 0; --i)
            if (!v[i].empty()) out.push_back({i, v[i]});
        return out;
    }
};

inline Word reconstruct(const Substitution& z, const Decomposition& d) {
    Word out;
    for (const auto& p : d.pieces()) {
        Word w = p.w;
        for (int k = 0; k < p.level; ++k) w = z.apply(w);
        out.insert(out.end(), w.begin(), w.end());
    }
    return out;
}

/// Decomposition of the window x[lo, hi) of the fixed point, from lengths only.
inline Decomposition decompose_window(const FixedPoint& fp, const BigInt& lo, const BigInt& hi) {
    require(lo >= 0 && lo <= hi, "bad window");
    Decomposition d;
    if (lo == hi) {
        d.u.assign(1, Word{});
        d.v.assign(1, Word{});
        return d;
    }
    const Substitution& z = fp.sub();
    const Hierarchy& h = fp.hierarchy();
    int L = fp.level_above(hi);
    Letter b = fp.letter();
    BigInt start = 0;
    auto child_starts = [&](int level, Letter node, const BigInt& s0) {
        const Word& img = z.image(node);
        std::vector<BigInt> cs(img.size() + 1);
        cs[0] = s0;
        for (size_t i = 0; i < img.size(); ++i) cs[i + 1] = cs[i] + h.length(level - 1, img[i]);
        return cs;
    };
    auto find_child = [](const std::vector<BigInt>& cs, const BigInt& q) {
        size_t i = 0;
        while (i + 1 < cs.size() && cs[i + 1] <= q) ++i;
        return i;
    };
    for (;;) {
        auto cs = child_starts(L, b, start);
        size_t ilo = find_child(cs, lo);
        size_t ihi = find_child(cs, hi - 1);
        if (ilo == ihi && !(cs[ilo] == lo && cs[ilo + 1] == hi)) {
            b = z.image(b)[ilo];
            start = cs[ilo];
            --L;
            continue;
        }
        const Word& img = z.image(b);
        d.u.assign(static_cast<size_t>(L), Word{});
        d.v.assign(static_cast<size_t>(L), Word{});
        bool left_partial = cs[ilo] != lo;
        bool right_partial = cs[ihi + 1] != hi;
        long f1 = left_partial ? static_cast<long>(ilo) + 1 : static_cast<long>(ilo);
        long f2 = right_partial ? static_cast<long>(ihi) - 1 : static_cast<long>(ihi);
        if (f1 <= f2) {
            Word w(img.begin() + f1, img.begin() + f2 + 1);
            if (f1 == 0) d.v[L - 1] = w;
            else if (f2 == static_cast<long>(img.size()) - 1) d.u[L - 1] = w;
            else {
                d.u[L - 1] = w;
                d.top_interior = true;
            }
        }
        if (left_partial) {
            int lev = L - 1;
            Letter c = img[ilo];
            BigInt q = lo - cs[ilo];
            while (true) {
                auto cc = child_starts(lev, c, BigInt(0));
                size_t i = find_child(cc, q);
                const Word& im = z.image(c);
                if (cc[i] == q) {
                    d.u[lev - 1] = Word(im.begin() + static_cast<long>(i), im.end());
                    break;
                }
                d.u[lev - 1] = Word(im.begin() + static_cast<long>(i) + 1, im.end());
                q -= cc[i];
                c = im[i];
                --lev;
            }
        }
        if (right_partial) {
            int lev = L - 1;
            Letter c = img[ihi];
            BigInt q = hi - cs[ihi];
            while (true) {
                auto cc = child_starts(lev, c, BigInt(0));
                size_t i = find_child(cc, q);
                const Word& im = z.image(c);
                d.v[lev - 1] = Word(im.begin(), im.begin() + static_cast<long>(i));
                if (cc[i] == q) break;
                q -= cc[i];
                c = im[i];
                --lev;
            }
        }
        break;
    }
    int n = static_cast<int>(d.u.size()) - 1;
    while (n > 0 && d.u[n].empty() && d.v[n].empty()) --n;
    d.u.resize(static_cast<size_t>(n + 1));
    d.v.resize(static_cast<size_t>(n + 1));
    return d;
}

/**
 * Locates @p word in the fixed point (first occurrence within @p budget
 * letters) and decomposes that occurrence.
 */
inline Decomposition prefix_suffix_decomposition(const FixedPoint& fp, const Word& word, size_t budget = 1u << 22) {
    if (word.empty()) return decompose_window(fp, 0, 0);
    size_t len = std::max<size_t>(4 * word.size(), 1024);
    for (;;) {
        len = std::min(len, budget);
        Word x = fp.prefix(len);
        auto it = std::search(x.begin(), x.end(), word.begin(), word.end());
        if (it != x.end()) {
            BigInt lo(static_cast<unsigned long>(it - x.begin()));
            return decompose_window(fp, lo, lo + BigInt(static_cast<unsigned long>(word.size())));
        }
        if (len >= budget) break;
        len *= 4;
    }
    fail(ErrorKind::NotInLanguage, "word not found within the first " + std::to_string(budget) + " letters");
}

struct ReturnWord {
    Word v;
    Letter c = 0;
    int power = 1; ///< smallest l with vc a factor of zeta^l(b) for every b
};

/**
 * Shortest return word: v starts with c, has no other c, and vc is in the
 * language. Ties go to the smallest c, then the lexicographically smallest v.
 */
inline ReturnWord find_return_word(const Substitution& z, size_t budget = 64, size_t expand_cap = 1u << 24) {
    int m = z.size();
    Hierarchy h(z);
    size_t want = std::max<size_t>(10 * budget, 1000);
    int K = 0;
    while (h.length(K, 0) < BigInt(static_cast<unsigned long>(want))) {
        ++K;
        require(K < 4096, "substitution does not expand");
    }
    if (h.length(K, 0) > BigInt(static_cast<unsigned long>(expand_cap)))
        fail(ErrorKind::BudgetExceeded, "language sample exceeds the expansion cap");
    Word X = iterate_word(z, 0, K, expand_cap);
    for (size_t L = 1; L <= budget; ++L) {
        for (int c = 0; c < m; ++c) {
            std::set<Word> found;
            for (size_t i = 0; i + L < X.size(); ++i) {
                if (X[i] != static_cast<Letter>(c) || X[i + L] != static_cast<Letter>(c)) continue;
                bool clean = true;
                for (size_t j = i + 1; j < i + L; ++j)
                    if (X[j] == static_cast<Letter>(c)) { clean = false; break; }
                if (clean) found.insert(Word(X.begin() + static_cast<long>(i), X.begin() + static_cast<long>(i + L)));
            }
            if (found.empty()) continue;
            ReturnWord r;
            r.v = *found.begin();
            r.c = static_cast<Letter>(c);
            Word vc = r.v;
            vc.push_back(r.c);
            for (int l = 1; l < 256; ++l) {
                bool all = true;
                for (int b = 0; b < m && all; ++b) {
                    if (h.length(l, static_cast<Letter>(b)) > BigInt(static_cast<unsigned long>(expand_cap)))
                        fail(ErrorKind::BudgetExceeded, "return word power search exceeds the expansion cap");
                    Word img = iterate_word(z, static_cast<Letter>(b), l, expand_cap);
                    all = std::search(img.begin(), img.end(), vc.begin(), vc.end()) != img.end();
                }
                if (all) {
                    r.power = l;
                    return r;
                }
            }
            fail(ErrorKind::NotFound, "return word found but no power contains it in every image");
        }
    }
    fail(ErrorKind::NotFound, "no return word of length <= " + std::to_string(budget));
}

enum class Periodicity { Aperiodic, PeriodicWitness, Unknown };

struct AperiodicityVerdict {
    Periodicity verdict = Periodicity::Unknown;
    size_t period = 0;
};

/// Factor-complexity growth test plus a period search on a long fixed-point prefix.
inline AperiodicityVerdict is_aperiodic_heuristic(const Substitution& z, size_t budget = 1u << 16) {
    FixedPoint fp(z);
    Word x = fp.prefix(budget);
    AperiodicityVerdict out;
    size_t n = x.size();
    size_t prev = 0;
    bool growing = true;
    for (size_t L = 1; L <= 24 && L < n / 2; ++L) {
        std::set<Word> f;
        for (size_t i = 0; i + L <= n; ++i) f.insert(Word(x.begin() + static_cast<long>(i), x.begin() + static_cast<long>(i + L)));
        if (f.size() <= prev) {
            growing = false;
            break;
        }
        prev = f.size();
    }
    if (growing) {
        out.verdict = Periodicity::Aperiodic;
        return out;
    }
    for (size_t p = 1; p <= n / 4; ++p) {
        bool per = true;
        for (size_t i = 0; i + p < n && per; ++i) per = x[i] == x[i + p];
        if (per) {
            out.verdict = Periodicity::PeriodicWitness;
            out.period = p;
            return out;
        }
    }
    return out;
}

} // namespace subdyn
