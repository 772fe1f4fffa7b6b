#pragma once
/**
 * @file roof.hpp
 * @brief Roof vectors s for suspension flows and the tiling lengths |v|_s = <l(v), s>.
 *
 * A roof is the unit vector (discrete case), an exact rational vector, or a
 * real vector available at any requested precision (the self-similar roof).
 */

#include "subdyn/error.hpp"
#include "subdyn/numeric/frequency.hpp"
#include "subdyn/numeric/mp.hpp"
#include "subdyn/substitution.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace subdyn {

class Roof {
public:
    enum class Kind { Unit, Exact, Real };

    Roof() = default;

    static Roof unit(int m) {
        Roof r;
        r.kind_ = Kind::Unit;
        r.m_ = m;
        r.d_.assign(static_cast<size_t>(m), 1.0);
        return r;
    }

    static Roof exact(std::vector<Rational> q) {
        Roof r;
        r.kind_ = Kind::Exact;
        r.m_ = static_cast<int>(q.size());
        for (auto& x : q) {
            x.canonicalize();
            if (x <= 0) fail(ErrorKind::InvalidArgument, "roof entries must be positive");
            r.d_.push_back(x.get_d());
        }
        r.q_ = std::move(q);
        return r;
    }

    /// Real roof produced on demand at any precision by @p gen.
    static Roof real(int m, std::function<std::vector<Mp>(long)> gen, bool self_similar = false) {
        Roof r;
        r.kind_ = Kind::Real;
        r.m_ = m;
        r.self_similar_ = self_similar;
        r.cache_ = std::make_shared<Cache>();
        r.cache_->gen = std::move(gen);
        for (const auto& x : r.values(128)) {
            if (x.sign() <= 0) fail(ErrorKind::InvalidArgument, "roof entries must be positive");
            r.d_.push_back(x.to_double());
        }
        return r;
    }

    /// PF eigenvector of S^t normalized to sum 1; S^t s = theta s.
    static Roof self_similar(const Substitution& z) {
        BigMatrix S = substitution_matrix(z);
        if (!is_primitive(S).primitive) fail(ErrorKind::NotPrimitive, "self-similar roof needs a primitive substitution");
        int m = z.size();
        return real(
            m,
            [S, m](long prec) {
                PerronData d = perron_data(S, prec + 32);
                Mp sum(prec + 96);
                for (const auto& x : d.l) sum = sum + x;
                std::vector<Mp> s;
                for (int i = 0; i < m; ++i) s.push_back((d.l[i] / sum).with_prec(prec));
                return s;
            },
            true);
    }

    Kind kind() const { return kind_; }
    int size() const { return m_; }
    bool is_unit() const { return kind_ == Kind::Unit; }
    bool is_self_similar() const { return self_similar_; }
    const std::vector<double>& values_d() const { return d_; }
    const std::vector<Rational>& exact_values() const { return q_; }

    double min() const { return *std::min_element(d_.begin(), d_.end()); }
    double max() const { return *std::max_element(d_.begin(), d_.end()); }

    std::vector<Mp> values(long prec) const {
        switch (kind_) {
        case Kind::Unit: return std::vector<Mp>(static_cast<size_t>(m_), Mp(prec, 1.0));
        case Kind::Exact: {
            std::vector<Mp> v;
            for (const auto& x : q_) v.push_back(Mp(prec, x));
            return v;
        }
        case Kind::Real: break;
        }
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->by_prec.lower_bound(prec);
        if (it == cache_->by_prec.end()) it = cache_->by_prec.emplace(prec, cache_->gen(prec)).first;
        std::vector<Mp> v;
        for (const auto& x : it->second) v.push_back(x.with_prec(prec));
        return v;
    }

    /// Exact <pop, s> when the roof is rational.
    Rational exact_length(const std::vector<BigInt>& pop) const {
        Rational X = 0;
        for (int i = 0; i < m_; ++i) X += kind_ == Kind::Unit ? Rational(pop[i]) : Rational(pop[i]) * q_[i];
        X.canonicalize();
        return X;
    }

    Mp length(const std::vector<BigInt>& pop, long prec) const {
        if (kind_ != Kind::Real) return Mp(prec, exact_length(pop));
        auto s = values(prec + 32);
        Mp X(prec + 32);
        for (int i = 0; i < m_; ++i) X = X + Mp(prec + 32, pop[i]) * s[i];
        return X.with_prec(prec);
    }

    double length_d(const std::vector<BigInt>& pop) const {
        double x = 0.0;
        for (int i = 0; i < m_; ++i) x += pop[i].get_d() * d_[i];
        return x;
    }

    /// Bits needed so that omega * <pop, s> is known to ~2^-100 absolutely.
    static long bits_for(const std::vector<BigInt>& pop) {
        long b = 1;
        for (const auto& x : pop) b = std::max(b, bit_length(x));
        return b + 140;
    }

    /// frac(omega * <pop, s>).
    DD turns(const Frequency& w, const std::vector<BigInt>& pop) const {
        if (kind_ == Kind::Unit) {
            BigInt L = 0;
            for (const auto& x : pop) L += x;
            return w.turns(L);
        }
        if (kind_ == Kind::Exact) return w.turns(exact_length(pop));
        long prec = bits_for(pop);
        if (!w.is_exact() && w.prec() < prec)
            fail(ErrorKind::PrecisionExhausted, "omega carries " + std::to_string(w.prec()) + " bits, " +
                                                    std::to_string(prec) + " needed for this tiling length");
        return w.turns(length(pop, prec));
    }

private:
    struct Cache {
        std::mutex mu;
        std::function<std::vector<Mp>(long)> gen;
        std::map<long, std::vector<Mp>> by_prec;
    };
    Kind kind_ = Kind::Unit;
    int m_ = 0;
    bool self_similar_ = false;
    std::vector<double> d_;
    std::vector<Rational> q_;
    std::shared_ptr<Cache> cache_;
};

} // namespace subdyn
