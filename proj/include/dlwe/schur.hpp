#pragma once

#include <stdexcept>
#include <vector>

#include "dlwe/rational.hpp"
#include "dlwe/sigma_poly.hpp"

namespace dlwe {

/// Table of the generalized Schur polynomials p_0..p_max, built once at
/// construction and immutable afterwards. p_n is the weighted-degree-n
/// polynomial whose generating function is exp(sum_j sigma_j h^j); it is
/// produced here by the recurrence n*p_n = sum_{j=1}^{n} j*sigma_j*p_{n-j}
/// (equivalent to enumerating the weighted compositions directly).
class SchurTable {
  public:
    explicit SchurTable(long max_degree) {
        if (max_degree < 0) max_degree = 0;
        table_.reserve(static_cast<std::size_t>(max_degree) + 1);
        table_.push_back(SigmaPoly::one());
        for (long n = 1; n <= max_degree; ++n) {
            SigmaPoly acc;
            for (long j = 1; j <= n; ++j)
                acc += Complexq(Rational(j)) * (SigmaPoly::variable(sigma(static_cast<std::int32_t>(j))) *
                                                table_[static_cast<std::size_t>(n - j)]);
            table_.push_back(Complexq(Rational(1, n)) * acc);
        }
    }

    long max_degree() const { return static_cast<long>(table_.size()) - 1; }

    /// p_n; the zero polynomial for n < 0.
    const SigmaPoly &p(long n) const {
        static const SigmaPoly kZero = SigmaPoly::zero();
        if (n < 0) return kZero;
        if (n > max_degree()) throw std::out_of_range("SchurTable: degree above table limit");
        return table_[static_cast<std::size_t>(n)];
    }

    /// p_n with starred variables. p_n has rational coefficients, so this is
    /// the plain conjugate.
    SigmaPoly p_star(long n) const { return p(n).conj(); }

  private:
    std::vector<SigmaPoly> table_;
};

/// Q_{m,n} = (p_{m-1} + k0 p_m) p_n^*; zero when m < 0 or n < 0.
inline SigmaPoly q_poly(const SchurTable &tab, long m, long n, const Complexq &k0) {
    if (m < 0 || n < 0) return SigmaPoly::zero();
    return (tab.p(m - 1) + k0 * tab.p(m)) * tab.p_star(n);
}

/// Z_{m,n,l} = sum_{j=0}^{l} C(l,j) (-1)^j Q_{m-l+j, n-j}: the l-th
/// x-derivative of Q_{m,n} stripped of its i^l prefactor.
inline SigmaPoly z_poly(const SchurTable &tab, long m, long n, long l, const Complexq &k0) {
    if (l < 0) throw std::invalid_argument("z_poly: negative derivative order");
    SigmaPoly acc;
    for (long j = 0; j <= l; ++j) {
        SigmaPoly q = q_poly(tab, m - l + j, n - j, k0);
        if (q.is_zero()) continue;
        Complexq c(binomial(static_cast<unsigned long>(l), static_cast<unsigned long>(j)));
        if (j % 2 == 1) c = -c;
        acc += c * q;
    }
    return acc;
}

}  // namespace dlwe
