#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "dlwe/determinant.hpp"
#include "dlwe/partition.hpp"
#include "dlwe/rational.hpp"
#include "dlwe/rst_poly.hpp"
#include "dlwe/schur.hpp"
#include "dlwe/sigma_poly.hpp"
#include "dlwe/solution_spec.hpp"

namespace dlwe {

/// Upper-triangular change-of-basis matrix U_{rs} = C(s,r)/(2b)^{s-r} of size
/// (2*mn+1), unit diagonal.
inline Matrix<Rational> u_matrix(long mn, const Rational &b) {
    if (mn < 1) throw std::invalid_argument("u_matrix: mn must be >= 1");
    if (b == 0) throw ParameterError("u_matrix: b must be nonzero");
    std::size_t dim = static_cast<std::size_t>(2 * mn + 1);
    Matrix<Rational> u(dim, dim, Rational(0));
    Rational inv2b = Rational(1) / (2 * b);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t s = r; s < dim; ++s)
            u(r, s) = binomial(s, r) * pow(inv2b, static_cast<long>(s - r));
    return u;
}

/// Diagonal D_{rr} = (2b)^{-2r}, size (2*mn+1).
inline std::vector<Rational> d_matrix(long mn, const Rational &b) {
    if (mn < 1) throw std::invalid_argument("d_matrix: mn must be >= 1");
    if (b == 0) throw ParameterError("d_matrix: b must be nonzero");
    std::size_t dim = static_cast<std::size_t>(2 * mn + 1);
    std::vector<Rational> d(dim);
    for (std::size_t r = 0; r < dim; ++r) d[r] = pow(2 * b, -2 * static_cast<long>(r));
    return d;
}

/// Gram weight matrix C_{ab} = C(a+b, b)/(2b)^{a+b} = U^T D U.
inline Matrix<Rational> c_matrix(long mn, const Rational &b) {
    if (mn < 1) throw std::invalid_argument("c_matrix: mn must be >= 1");
    if (b == 0) throw ParameterError("c_matrix: b must be nonzero");
    std::size_t dim = static_cast<std::size_t>(2 * mn + 1);
    Matrix<Rational> c(dim, dim, Rational(0));
    for (std::size_t al = 0; al < dim; ++al)
        for (std::size_t be = 0; be < dim; ++be)
            c(al, be) = binomial(al + be, be) * pow(2 * b, -static_cast<long>(al + be));
    return c;
}

/// One Cauchy-Binet summand: the minor combination Q(r) together with its
/// index and the exponent |r| of the (2b)^{-2|r|} prefactor.
struct TauTerm {
    MultiIndex index;
    SigmaPoly combo;
    long weight;
};

/// Builds every symbolic object attached to one solution spec: the Z
/// calculus, the W minors, the combinations Q(r), and the two determinant
/// oracles. All caches fill idempotently; emitted polynomials are values.
class TauBuilder {
  public:
    explicit TauBuilder(SolutionSpec spec)
        : spec_(std::move(spec)),
          table_(spec_.mn),
          u_(u_matrix(spec_.mn, spec_.b)),
          d_(d_matrix(spec_.mn, spec_.b)) {}

    const SolutionSpec &spec() const { return spec_; }
    const SchurTable &schur() const { return table_; }
    const Matrix<Rational> &u() const { return u_; }
    const std::vector<Rational> &d() const { return d_; }

    /// Q_{m,n} for this spec's k0, cached.
    const SigmaPoly &q(long m, long n) {
        auto key = std::make_pair(m, n);
        auto it = q_cache_.find(key);
        if (it == q_cache_.end()) it = q_cache_.emplace(key, q_poly(table_, m, n, spec_.k0)).first;
        return it->second;
    }

    /// Z_{m,n,l} for this spec's k0, cached.
    const SigmaPoly &z(long m, long n, long l) {
        auto key = std::make_tuple(m, n, l);
        auto it = z_cache_.find(key);
        if (it == z_cache_.end()) it = z_cache_.emplace(key, z_poly(table_, m, n, l, spec_.k0)).first;
        return it->second;
    }

    /// Entry (row, col) of the (2*mn+1) x n matrix W: Z_{m_j, m_n, row}.
    const SigmaPoly &w_entry(long row, std::size_t col) {
        return z(spec_.m.entry(col), spec_.mn, row);
    }

    /// n x n minor W(r) of the W matrix on the rows selected by r.
    const SigmaPoly &w_minor(const MultiIndex &r) {
        check_admissible(r);
        auto it = w_cache_.find(r.entries());
        if (it != w_cache_.end()) return it->second;
        std::size_t n = static_cast<std::size_t>(spec_.n);
        Matrix<SigmaPoly> mat(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) mat(i, j) = w_entry(r.entry(i), j);
        std::vector<std::size_t> idx(n);
        for (std::size_t k = 0; k < n; ++k) idx[k] = k;
        return w_cache_.emplace(r.entries(), minor_determinant(mat, idx, idx)).first->second;
    }

    /// n x n minor of U on rows r and columns s (exact rational).
    Rational u_minor(const MultiIndex &r, const MultiIndex &s) const {
        std::vector<std::size_t> rows(r.size()), cols(s.size());
        for (std::size_t k = 0; k < r.size(); ++k) rows[k] = static_cast<std::size_t>(r.entry(k));
        for (std::size_t k = 0; k < s.size(); ++k) cols[k] = static_cast<std::size_t>(s.entry(k));
        return minor_determinant(u_, rows, cols);
    }

    /// Q(r) = sum_{s >= r} U(r;s) P(s) with P(s) = i^{|s|} W(s).
    TauTerm q_of_r(const MultiIndex &r) {
        check_admissible(r);
        SigmaPoly combo;
        for (const MultiIndex &s : indices()) {
            if (!compare_multiindices(r, s).dominated) continue;
            Rational um = u_minor(r, s);
            if (um == 0) continue;
            combo += (Complexq::i_pow(s.sum()) * Complexq(um)) * w_minor(s);
        }
        return TauTerm{r, std::move(combo), r.sum()};
    }

    /// Every Cauchy-Binet term, in lexicographic index order.
    std::vector<TauTerm> tau_terms() {
        std::vector<TauTerm> out;
        out.reserve(indices().size());
        for (const MultiIndex &r : indices()) out.push_back(q_of_r(r));
        return out;
    }

    /// All admissible multi-indices for this spec, lexicographic.
    const std::vector<MultiIndex> &indices() {
        if (indices_.empty()) indices_ = enumerate_multiindices(static_cast<std::size_t>(spec_.n), spec_.mn);
        return indices_;
    }

    /// Substituted image of Z_{m_j, m_n, row}: a polynomial in (r, s, t).
    const RstPoly &w_entry_rst(long row, std::size_t col) {
        auto key = std::make_pair(row, static_cast<long>(col));
        auto it = wrst_cache_.find(key);
        if (it == wrst_cache_.end())
            it = wrst_cache_.emplace(key, substitute_sigma(w_entry(row, col), spec_.substitution())).first;
        return it->second;
    }

    /// Independent determinant oracle: evaluates H = P^dagger C P at an exact
    /// point and returns det H, which must be real.
    Rational tau_oracle_det(const Rational &r, const Rational &s, const Rational &t) {
        std::size_t n = static_cast<std::size_t>(spec_.n);
        std::size_t dim = static_cast<std::size_t>(2 * spec_.mn + 1);
        // P_{l,j} = i^l * W_{l,j} at the point
        Matrix<Complexq> p(dim, n);
        for (std::size_t l = 0; l < dim; ++l)
            for (std::size_t j = 0; j < n; ++j)
                p(l, j) = Complexq::i_pow(static_cast<long>(l)) * w_entry_rst(static_cast<long>(l), j).evaluate(r, s, t);
        const Matrix<Rational> c = c_matrix(spec_.mn, spec_.b);
        Matrix<Complexq> h(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Complexq acc;
                for (std::size_t al = 0; al < dim; ++al)
                    for (std::size_t be = 0; be < dim; ++be)
                        acc += p(al, j).conj() * Complexq(c(al, be)) * p(be, i);
                h(i, j) = std::move(acc);
            }
        Complexq det = determinant(h);
        if (det.im != 0) throw std::logic_error("tau_oracle_det: determinant not real");
        return det.re;
    }

    /// Entry (i, j) of the unapproximated Gramian factor A:
    /// sum_{l=0}^{m_i+m_j} (i/(2b))^l Z_{m_i, m_j, l}.
    const SigmaPoly &full_a_entry(std::size_t i, std::size_t j) {
        auto key = std::make_pair(static_cast<long>(i), static_cast<long>(j));
        auto it = a_cache_.find(key);
        if (it != a_cache_.end()) return it->second;
        long mi = spec_.m.entry(i), mj = spec_.m.entry(j);
        SigmaPoly acc;
        Complexq i_over_2b = Complexq::i() * Complexq(Rational(1) / (2 * spec_.b));
        Complexq w(Rational(1));
        for (long l = 0; l <= mi + mj; ++l) {
            acc += w * z(mi, mj, l);
            w *= i_over_2b;
        }
        return a_cache_.emplace(key, std::move(acc)).first->second;
    }

    /// Substituted image of full_a_entry, cached.
    const RstPoly &full_a_entry_rst(std::size_t i, std::size_t j) {
        auto key = std::make_pair(static_cast<long>(i), static_cast<long>(j));
        auto it = arst_cache_.find(key);
        if (it == arst_cache_.end())
            it = arst_cache_.emplace(key, substitute_sigma(full_a_entry(i, j), spec_.substitution())).first;
        return it->second;
    }

    /// Unapproximated tau: det A * det B = |det A|^2 at an exact point
    /// (B is the conjugate transpose of A). Comparison oracle only.
    Rational tau_full_ab(const Rational &r, const Rational &s, const Rational &t) {
        std::size_t n = static_cast<std::size_t>(spec_.n);
        Matrix<Complexq> a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = full_a_entry_rst(i, j).evaluate(r, s, t);
        return determinant(a).norm();
    }

  private:
    void check_admissible(const MultiIndex &r) const {
        if (static_cast<long>(r.size()) != spec_.n)
            throw InvalidMultiIndex("TauBuilder: multi-index length != partition length");
        if (r.entries().back() > 2 * spec_.mn)
            throw InvalidMultiIndex("TauBuilder: multi-index entry exceeds 2*mn");
    }

    SolutionSpec spec_;
    SchurTable table_;
    Matrix<Rational> u_;
    std::vector<Rational> d_;
    std::vector<MultiIndex> indices_;
    std::map<std::pair<long, long>, SigmaPoly> q_cache_;
    std::map<std::tuple<long, long, long>, SigmaPoly> z_cache_;
    std::map<std::vector<long>, SigmaPoly> w_cache_;
    std::map<std::pair<long, long>, RstPoly> wrst_cache_;
    std::map<std::pair<long, long>, SigmaPoly> a_cache_;
    std::map<std::pair<long, long>, RstPoly> arst_cache_;
};

}  // namespace dlwe
