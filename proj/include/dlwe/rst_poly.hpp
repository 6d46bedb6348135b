#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlwe/rational.hpp"
#include "dlwe/sigma_poly.hpp"

namespace dlwe {

enum class RstVar : std::uint8_t { R = 0, S = 1, T = 2 };

struct RstMono {
    std::uint32_t r = 0, s = 0, t = 0;

    friend auto operator<=>(const RstMono &, const RstMono &) = default;

    long total_degree() const { return static_cast<long>(r) + s + t; }
    long rs_degree() const { return static_cast<long>(r) + s; }
};

/// Polynomial in the travelling coordinates (r, s) and time t with exact
/// Gaussian-rational coefficients. r, s, t are real symbols: conjugation
/// acts on coefficients only.
class RstPoly {
  public:
    using TermMap = std::map<RstMono, Complexq>;

    RstPoly() = default;

    static RstPoly zero() { return {}; }

    static RstPoly constant(Complexq c) {
        RstPoly p;
        if (!c.is_zero()) p.terms_[RstMono{}] = std::move(c);
        return p;
    }

    static RstPoly one() { return constant(Complexq(1L)); }

    static RstPoly variable(RstVar v) {
        RstMono m;
        if (v == RstVar::R) m.r = 1;
        if (v == RstVar::S) m.s = 1;
        if (v == RstVar::T) m.t = 1;
        RstPoly p;
        p.terms_[m] = Complexq(1L);
        return p;
    }

    static RstPoly monomial(RstMono m, Complexq c) {
        RstPoly p;
        if (!c.is_zero()) p.terms_[m] = std::move(c);
        return p;
    }

    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    long total_degree() const {
        long d = -1;
        for (const auto &[m, c] : terms_) d = std::max(d, m.total_degree());
        return d;
    }

    long degree(RstVar v) const {
        long d = -1;
        for (const auto &[m, c] : terms_) {
            long e = v == RstVar::R ? m.r : v == RstVar::S ? m.s : m.t;
            d = std::max(d, e);
        }
        return d;
    }

    /// Combined degree in (r, s) only.
    long rs_degree() const {
        long d = -1;
        for (const auto &[m, c] : terms_) d = std::max(d, m.rs_degree());
        return d;
    }

    Complexq coefficient(const RstMono &m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Complexq() : it->second;
    }

    bool is_real() const {
        for (const auto &[m, c] : terms_)
            if (c.im != 0) return false;
        return true;
    }

    /// Returns *this with the real flag set; throws if any coefficient has a
    /// nonzero imaginary part.
    RstPoly real_checked() const {
        if (!is_real()) throw std::logic_error("RstPoly: real flag check failed");
        RstPoly p = *this;
        p.real_flag_ = true;
        return p;
    }

    bool real_flagged() const { return real_flag_; }

    RstPoly &operator+=(const RstPoly &o) {
        for (const auto &[m, c] : o.terms_) add_term(m, c);
        real_flag_ = real_flag_ && o.real_flag_;
        return *this;
    }
    RstPoly &operator-=(const RstPoly &o) {
        for (const auto &[m, c] : o.terms_) add_term(m, -c);
        real_flag_ = real_flag_ && o.real_flag_;
        return *this;
    }

    friend RstPoly operator+(RstPoly a, const RstPoly &b) { return a += b; }
    friend RstPoly operator-(RstPoly a, const RstPoly &b) { return a -= b; }

    friend RstPoly operator*(const RstPoly &a, const RstPoly &b) {
        RstPoly out;
        for (const auto &[ma, ca] : a.terms_)
            for (const auto &[mb, cb] : b.terms_)
                out.add_term(RstMono{ma.r + mb.r, ma.s + mb.s, ma.t + mb.t}, ca * cb);
        out.real_flag_ = a.real_flag_ && b.real_flag_;
        return out;
    }

    friend RstPoly operator*(const Complexq &c, const RstPoly &p) {
        RstPoly out;
        if (c.is_zero()) return out;
        for (const auto &[m, pc] : p.terms_) out.terms_[m] = c * pc;
        out.real_flag_ = p.real_flag_ && c.is_real();
        return out;
    }

    friend RstPoly operator-(const RstPoly &p) { return Complexq(-1L) * p; }

    friend bool operator==(const RstPoly &a, const RstPoly &b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const RstPoly &a, const RstPoly &b) { return !(a == b); }

    /// Coefficientwise conjugation (r, s, t stay real symbols).
    RstPoly conj() const {
        RstPoly out;
        for (const auto &[m, c] : terms_) out.terms_[m] = c.conj();
        out.real_flag_ = real_flag_;
        return out;
    }

    /// Exact formal partial derivative of the given order.
    RstPoly diff(RstVar v, unsigned order = 1) const {
        RstPoly cur = *this;
        for (unsigned k = 0; k < order; ++k) {
            RstPoly next;
            for (const auto &[m, c] : cur.terms_) {
                std::uint32_t e = v == RstVar::R ? m.r : v == RstVar::S ? m.s : m.t;
                if (e == 0) continue;
                RstMono dm = m;
                if (v == RstVar::R) --dm.r;
                if (v == RstVar::S) --dm.s;
                if (v == RstVar::T) --dm.t;
                next.add_term(dm, c * Complexq(static_cast<long>(e)));
            }
            next.real_flag_ = cur.real_flag_;
            cur = std::move(next);
        }
        return cur;
    }

    /// Exact evaluation at a rational point.
    Complexq evaluate(const Rational &r, const Rational &s, const Rational &t) const {
        // power tables keep this linear in the term count
        long dr = std::max(degree(RstVar::R), 0L);
        long ds = std::max(degree(RstVar::S), 0L);
        long dt = std::max(degree(RstVar::T), 0L);
        std::vector<Rational> pr = power_table(r, dr), ps = power_table(s, ds), pt = power_table(t, dt);
        Complexq acc;
        for (const auto &[m, c] : terms_) acc += c * Complexq(pr[m.r] * ps[m.s] * pt[m.t]);
        return acc;
    }

    std::complex<double> evaluate(double r, double s, double t) const {
        std::complex<double> acc{0.0, 0.0};
        for (const auto &[m, c] : terms_) {
            double mono = 1.0;
            for (std::uint32_t k = 0; k < m.r; ++k) mono *= r;
            for (std::uint32_t k = 0; k < m.s; ++k) mono *= s;
            for (std::uint32_t k = 0; k < m.t; ++k) mono *= t;
            acc += c.to_complex() * mono;
        }
        return acc;
    }

    /// Exact substitution t = t0; the result has t-degree 0.
    RstPoly at_time(const Rational &t0) const {
        long dt = std::max(degree(RstVar::T), 0L);
        std::vector<Rational> pt = power_table(t0, dt);
        RstPoly out;
        for (const auto &[m, c] : terms_) out.add_term(RstMono{m.r, m.s, 0}, c * Complexq(pt[m.t]));
        out.real_flag_ = real_flag_;
        return out;
    }

    /// Coefficientwise multiplication with the conjugate: |p|^2 as a
    /// polynomial over the real symbols. The result carries the real flag.
    RstPoly modulus_squared() const { return ((*this) * conj()).real_checked(); }

    std::string to_canonical_string() const {
        if (terms_.empty()) return "0";
        std::vector<const std::pair<const RstMono, Complexq> *> order;
        order.reserve(terms_.size());
        for (const auto &t : terms_) order.push_back(&t);
        std::sort(order.begin(), order.end(), [](auto *a, auto *b) {
            long da = a->first.total_degree(), db = b->first.total_degree();
            if (da != db) return da < db;
            return a->first < b->first;
        });
        std::string out;
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (k) out += " + ";
            out += "(" + to_string(order[k]->second) + ")";
            auto var = [&](const char *name, std::uint32_t e) {
                if (e == 0) return;
                out += "*";
                out += name;
                if (e > 1) out += "^" + std::to_string(e);
            };
            var("r", order[k]->first.r);
            var("s", order[k]->first.s);
            var("t", order[k]->first.t);
        }
        return out;
    }

  private:
    void add_term(const RstMono &m, const Complexq &c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    static std::vector<Rational> power_table(const Rational &x, long dmax) {
        std::vector<Rational> p(static_cast<std::size_t>(dmax) + 1);
        p[0] = 1;
        for (long k = 1; k <= dmax; ++k) p[k] = p[k - 1] * x;
        return p;
    }

    TermMap terms_;
    bool real_flag_ = false;
};

class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters of the affine substitution sending the sigma variables to
/// polynomials in (r, s, t): b and omega are nonzero rationals, the gammas
/// are free complex constants (zero by default).
struct SigmaSubstitution {
    Rational b;
    Rational omega;
    std::array<Complexq, 3> gamma{};

    SigmaSubstitution(Rational b_, Rational omega_) : b(std::move(b_)), omega(std::move(omega_)) {
        b.canonicalize();
        omega.canonicalize();
        if (b == 0) throw ParameterError("substitution requires b != 0");
        if (omega == 0) throw ParameterError("substitution requires omega != 0");
    }

    /// Image of sigma_j (or its starred partner): zero for j > 3.
    RstPoly image(SigmaVar v) const {
        RstPoly p;
        const Complexq I = Complexq::i();
        switch (v.index) {
            case 1:
                // i*(r + i*s + gamma1) = i*r - s + i*gamma1
                p += RstPoly::monomial(RstMono{1, 0, 0}, I);
                p += RstPoly::monomial(RstMono{0, 1, 0}, Complexq(-1L));
                p += RstPoly::constant(I * gamma[0]);
                break;
            case 2:
                // -s/(2*b*omega) + t/omega + i*s/(2*b) + i*gamma2
                p += RstPoly::monomial(RstMono{0, 1, 0},
                                       Complexq(Rational(-1) / (2 * b * omega), Rational(1) / (2 * b)));
                p += RstPoly::monomial(RstMono{0, 0, 1}, Complexq(Rational(1) / omega));
                p += RstPoly::constant(I * gamma[1]);
                break;
            case 3:
                // i*s/(6*b^2*omega) - i*t/(3*b*omega) + i*gamma3
                p += RstPoly::monomial(RstMono{0, 1, 0}, Complexq(Rational(0), Rational(1) / (6 * b * b * omega)));
                p += RstPoly::monomial(RstMono{0, 0, 1}, Complexq(Rational(0), Rational(-1) / (3 * b * omega)));
                p += RstPoly::constant(I * gamma[2]);
                break;
            default:
                break;  // sigma_j = 0 for j > 3
        }
        if (v.starred) p = p.conj();
        return p;
    }
};

/// Expands a sigma polynomial through the substitution, exactly.
inline RstPoly substitute_sigma(const SigmaPoly &p, const SigmaSubstitution &params) {
    // memoized powers of each variable image
    std::map<SigmaVar, std::vector<RstPoly>> powers;
    auto power = [&](SigmaVar v, std::uint32_t e) -> const RstPoly & {
        auto &tab = powers[v];
        if (tab.empty()) {
            tab.push_back(RstPoly::one());
            tab.push_back(params.image(v));
        }
        while (tab.size() <= e) tab.push_back(tab.back() * tab[1]);
        return tab[e];
    };
    RstPoly out;
    for (const auto &[m, c] : p.terms()) {
        RstPoly term = RstPoly::constant(c);
        for (const auto &[v, e] : m) {
            term = term * power(v, e);
            if (term.is_zero()) break;
        }
        out += term;
    }
    return out;
}

/// Fixed-size bivariate Horner evaluator over floating coefficients;
/// the workhorse for grid evaluation and Newton iterations.
template <class Coeff>
class Horner2D {
  public:
    Horner2D() = default;

    /// Builds from a polynomial with t-degree 0 (call at_time first).
    explicit Horner2D(const RstPoly &p) {
        if (p.degree(RstVar::T) > 0) throw std::logic_error("Horner2D: polynomial still depends on t");
        long dr = std::max(p.degree(RstVar::R), 0L);
        long ds = std::max(p.degree(RstVar::S), 0L);
        rows_.assign(static_cast<std::size_t>(dr) + 1, std::vector<Coeff>(static_cast<std::size_t>(ds) + 1, Coeff{}));
        for (const auto &[m, c] : p.terms()) rows_[m.r][m.s] += convert(c);
    }

    Coeff operator()(double r, double s) const {
        if (rows_.empty()) return Coeff{};
        Coeff acc{};
        for (std::size_t i = rows_.size(); i-- > 0;) {
            const auto &row = rows_[i];
            Coeff rs{};
            for (std::size_t j = row.size(); j-- > 0;) rs = rs * s + row[j];
            acc = acc * r + rs;
        }
        return acc;
    }

    /// Sum of |coefficient| * |r|^i * |s|^j; a rounding-error scale for
    /// evaluations at (r, s).
    double magnitude_bound(double r, double s) const {
        double ar = std::abs(r), as = std::abs(s), acc = 0.0, pr = 1.0;
        for (const auto &row : rows_) {
            double ps = 1.0;
            for (const auto &c : row) {
                acc += std::abs(c) * pr * ps;
                ps *= as;
            }
            pr *= ar;
        }
        return acc;
    }

    bool empty() const { return rows_.empty(); }

  private:
    static Coeff convert(const Complexq &c) {
        if constexpr (std::is_same_v<Coeff, double>) {
            if (c.im != 0) throw std::logic_error("Horner2D<double>: complex coefficient");
            return c.re.get_d();
        } else {
            return Coeff(c.re.get_d(), c.im.get_d());
        }
    }

    std::vector<std::vector<Coeff>> rows_;
};

}  // namespace dlwe
