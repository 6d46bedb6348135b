#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <utility>

#include "dlwe/rational.hpp"
#include "dlwe/schur.hpp"
#include "dlwe/solution_spec.hpp"

namespace dlwe {

/// Bivariate polynomial in (rho, nu) with exact rational coefficients; the
/// heat polynomials H_r = sum_{j+2k=r} rho^j nu^k / (j! k!) live here.
class HeatPoly {
  public:
    using TermMap = std::map<std::pair<long, long>, Rational>;  // (j, k) -> coeff

    HeatPoly() = default;

    static HeatPoly zero() { return {}; }

    static HeatPoly heat(long r) {
        HeatPoly h;
        if (r < 0) return h;
        for (long k = 0; 2 * k <= r; ++k) {
            long j = r - 2 * k;
            h.terms_[{j, k}] = Rational(1) / (factorial(static_cast<unsigned long>(j)) *
                                              factorial(static_cast<unsigned long>(k)));
        }
        return h;
    }

    static HeatPoly monomial(long j, long k, Rational c) {
        HeatPoly h;
        if (c != 0) h.terms_[{j, k}] = std::move(c);
        return h;
    }

    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    HeatPoly diff_rho() const {
        HeatPoly out;
        for (const auto &[jk, c] : terms_) {
            auto [j, k] = jk;
            if (j == 0) continue;
            out.add({j - 1, k}, c * j);
        }
        return out;
    }

    HeatPoly diff_nu() const {
        HeatPoly out;
        for (const auto &[jk, c] : terms_) {
            auto [j, k] = jk;
            if (k == 0) continue;
            out.add({j, k - 1}, c * k);
        }
        return out;
    }

    HeatPoly &operator+=(const HeatPoly &o) {
        for (const auto &[jk, c] : o.terms_) add(jk, c);
        return *this;
    }

    friend HeatPoly operator*(const Rational &c, const HeatPoly &h) {
        HeatPoly out;
        if (c == 0) return out;
        for (const auto &[jk, hc] : h.terms_) out.terms_[jk] = c * hc;
        return out;
    }

    friend HeatPoly operator*(const HeatPoly &a, const HeatPoly &b) {
        HeatPoly out;
        for (const auto &[ma, ca] : a.terms_)
            for (const auto &[mb, cb] : b.terms_)
                out.add({ma.first + mb.first, ma.second + mb.second}, ca * cb);
        return out;
    }

    friend bool operator==(const HeatPoly &a, const HeatPoly &b) { return a.terms_ == b.terms_; }

    std::complex<double> evaluate(std::complex<double> rho, double nu) const {
        std::complex<double> acc{0.0, 0.0};
        for (const auto &[jk, c] : terms_) {
            auto [j, k] = jk;
            std::complex<double> term{c.get_d(), 0.0};
            for (long x = 0; x < j; ++x) term *= rho;
            for (long x = 0; x < k; ++x) term *= nu;
            acc += term;
        }
        return acc;
    }

  private:
    void add(std::pair<long, long> jk, const Rational &c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(jk, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    TermMap terms_;
};

inline HeatPoly heat_poly(long r) { return HeatPoly::heat(r); }

/// nu = 1/omega for t < 0 and -1/omega for t >= 0.
inline Rational nu_of_t(const Rational &omega, double t) {
    if (omega == 0) throw ParameterError("nu_of_t: omega must be nonzero");
    return t < 0 ? Rational(1) / omega : Rational(-1) / omega;
}

/// Diagnostic for the large-|t| limit: evaluates
/// p_n(r, s, t) / (i^n |t|^{n/2}) at the point z = rho * sqrt(|t|),
/// which converges to H_n(rho, nu_of_t) as |t| grows.
inline std::complex<double> schur_heat_ratio(const SchurTable &table, const SolutionSpec &spec,
                                             long n, std::complex<double> rho, double t) {
    if (t == 0) throw std::invalid_argument("schur_heat_ratio: |t| must be positive");
    double root = std::sqrt(std::abs(t));
    double r = rho.real() * root, s = rho.imag() * root;
    SigmaSubstitution sub = spec.substitution();
    auto sigma_value = [&](SigmaVar v) {
        return sub.image(v).evaluate(r, s, t);
    };
    std::complex<double> p = table.p(n).evaluate(sigma_value);
    std::complex<double> i_pow{1.0, 0.0};
    const std::complex<double> I{0.0, 1.0};
    for (long k = 0; k < ((n % 4) + 4) % 4; ++k) i_pow *= I;
    return p / (i_pow * std::pow(root, static_cast<double>(n)));
}

}  // namespace dlwe
