#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dlwe/rational.hpp"

namespace dlwe {

/// Formal variable of the sigma ring: sigma_j (index >= 1) or its starred
/// conjugate partner. Ordering puts all unstarred variables before starred
/// ones, each block by index.
struct SigmaVar {
    std::int32_t index;
    bool starred;

    friend auto operator<=>(const SigmaVar &, const SigmaVar &) = default;
};

inline SigmaVar sigma(std::int32_t j) { return {j, false}; }
inline SigmaVar sigma_star(std::int32_t j) { return {j, true}; }

/// Monomial: sorted (variable, exponent) pairs, exponents >= 1.
using SigmaMono = std::vector<std::pair<SigmaVar, std::uint32_t>>;

inline long weighted_degree(const SigmaMono &m) {
    long d = 0;
    for (const auto &[v, e] : m) d += static_cast<long>(v.index) * e;
    return d;
}

inline long total_degree(const SigmaMono &m) {
    long d = 0;
    for (const auto &[v, e] : m) d += e;
    return d;
}

/// Exact-coefficient polynomial over the sigma variables and their starred
/// partners, with weights wt(sigma_j) = wt(sigma_j*) = j. Values are
/// immutable in spirit: every operation returns a fresh polynomial and zero
/// coefficients are never stored.
class SigmaPoly {
  public:
    using TermMap = std::map<SigmaMono, Complexq>;

    SigmaPoly() = default;

    static SigmaPoly zero() { return {}; }

    static SigmaPoly constant(Complexq c) {
        SigmaPoly p;
        if (!c.is_zero()) p.terms_[SigmaMono{}] = std::move(c);
        return p;
    }

    static SigmaPoly one() { return constant(Complexq(1L)); }

    static SigmaPoly variable(SigmaVar v) {
        SigmaPoly p;
        p.terms_[SigmaMono{{v, 1}}] = Complexq(1L);
        return p;
    }

    static SigmaPoly monomial(SigmaMono m, Complexq c) {
        SigmaPoly p;
        if (!c.is_zero()) p.terms_[std::move(m)] = std::move(c);
        return p;
    }

    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    /// Largest weighted degree among monomials; -1 for the zero polynomial.
    long weighted_degree() const {
        long d = -1;
        for (const auto &[m, c] : terms_) d = std::max(d, dlwe::weighted_degree(m));
        return d;
    }

    /// Largest variable index referenced (0 for constants).
    std::int32_t max_index() const {
        std::int32_t k = 0;
        for (const auto &[m, c] : terms_)
            for (const auto &[v, e] : m) k = std::max(k, v.index);
        return k;
    }

    Complexq coefficient(const SigmaMono &m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Complexq() : it->second;
    }

    SigmaPoly &operator+=(const SigmaPoly &o) {
        for (const auto &[m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    SigmaPoly &operator-=(const SigmaPoly &o) {
        for (const auto &[m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    friend SigmaPoly operator+(SigmaPoly a, const SigmaPoly &b) { return a += b; }
    friend SigmaPoly operator-(SigmaPoly a, const SigmaPoly &b) { return a -= b; }

    friend SigmaPoly operator*(const SigmaPoly &a, const SigmaPoly &b) {
        SigmaPoly out;
        for (const auto &[ma, ca] : a.terms_)
            for (const auto &[mb, cb] : b.terms_) out.add_term(mul_mono(ma, mb), ca * cb);
        return out;
    }

    friend SigmaPoly operator*(const Complexq &c, const SigmaPoly &p) {
        SigmaPoly out;
        if (c.is_zero()) return out;
        for (const auto &[m, pc] : p.terms_) out.terms_[m] = c * pc;
        return out;
    }

    friend SigmaPoly operator-(const SigmaPoly &p) { return Complexq(-1L) * p; }

    friend bool operator==(const SigmaPoly &a, const SigmaPoly &b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const SigmaPoly &a, const SigmaPoly &b) { return !(a == b); }

    /// Conjugation: sigma_j <-> sigma_j*, coefficients conjugated.
    SigmaPoly conj() const {
        SigmaPoly out;
        for (const auto &[m, c] : terms_) {
            SigmaMono sm = m;
            for (auto &[v, e] : sm) v.starred = !v.starred;
            std::sort(sm.begin(), sm.end());
            out.terms_[std::move(sm)] = c.conj();
        }
        return out;
    }

    /// Formal partial derivative with respect to one variable.
    SigmaPoly diff(SigmaVar v) const {
        SigmaPoly out;
        for (const auto &[m, c] : terms_) {
            for (std::size_t k = 0; k < m.size(); ++k) {
                if (m[k].first != v) continue;
                SigmaMono dm = m;
                Complexq dc = c * Complexq(static_cast<long>(m[k].second));
                if (dm[k].second == 1)
                    dm.erase(dm.begin() + static_cast<std::ptrdiff_t>(k));
                else
                    --dm[k].second;
                out.add_term(dm, dc);
                break;
            }
        }
        return out;
    }

    /// Numeric evaluation; `value(v)` supplies each variable.
    std::complex<double> evaluate(const std::function<std::complex<double>(SigmaVar)> &value) const {
        std::complex<double> acc{0.0, 0.0};
        for (const auto &[m, c] : terms_) {
            std::complex<double> t = c.to_complex();
            for (const auto &[v, e] : m) {
                std::complex<double> base = value(v);
                for (std::uint32_t k = 0; k < e; ++k) t *= base;
            }
            acc += t;
        }
        return acc;
    }

    /// Canonical text form: terms sorted by total degree then variable-lex,
    /// each as "(coeff)" or "(coeff)*s1^2*s2*".
    std::string to_canonical_string() const {
        if (terms_.empty()) return "0";
        std::vector<const std::pair<const SigmaMono, Complexq> *> order;
        order.reserve(terms_.size());
        for (const auto &t : terms_) order.push_back(&t);
        std::sort(order.begin(), order.end(), [](auto *a, auto *b) {
            long da = total_degree(a->first), db = total_degree(b->first);
            if (da != db) return da < db;
            return a->first < b->first;
        });
        std::string out;
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (k) out += " + ";
            out += "(" + to_string(order[k]->second) + ")";
            for (const auto &[v, e] : order[k]->first) {
                out += "*s" + std::to_string(v.index);
                if (v.starred) out += "*";  // conjugate marker
                if (e > 1) out += "^" + std::to_string(e);
            }
        }
        return out;
    }

  private:
    void add_term(const SigmaMono &m, const Complexq &c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    static SigmaMono mul_mono(const SigmaMono &a, const SigmaMono &b) {
        SigmaMono out;
        out.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].first < b[j].first)
                out.push_back(a[i++]);
            else if (b[j].first < a[i].first)
                out.push_back(b[j++]);
            else {
                out.emplace_back(a[i].first, a[i].second + b[j].second);
                ++i;
                ++j;
            }
        }
        for (; i < a.size(); ++i) out.push_back(a[i]);
        for (; j < b.size(); ++j) out.push_back(b[j]);
        return out;
    }

    TermMap terms_;
};

}  // namespace dlwe
