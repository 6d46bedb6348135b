#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dlwe {

using Rational = mpq_class;

/// Exact Gaussian rational a + b*i. All ring operations are exact; the only
/// lossy conversion is to_complex().
struct Complexq {
    Rational re{0};
    Rational im{0};

    Complexq() = default;
    Complexq(Rational r) : re(std::move(r)) {}
    Complexq(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    Complexq(long r) : re(r) {}
    Complexq(long r, long i) : re(r), im(i) {}

    static Complexq i() { return {Rational(0), Rational(1)}; }

    /// i^k for any integer k (period 4).
    static Complexq i_pow(long k) {
        switch (((k % 4) + 4) % 4) {
            case 0: return {Rational(1), Rational(0)};
            case 1: return {Rational(0), Rational(1)};
            case 2: return {Rational(-1), Rational(0)};
            default: return {Rational(0), Rational(-1)};
        }
    }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    Complexq conj() const { return {re, -im}; }

    /// |z|^2, exact.
    Rational norm() const { return re * re + im * im; }

    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

    Complexq &operator+=(const Complexq &o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complexq &operator-=(const Complexq &o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complexq &operator*=(const Complexq &o) {
        Rational r = re * o.re - im * o.im;
        Rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend Complexq operator+(Complexq a, const Complexq &b) { return a += b; }
    friend Complexq operator-(Complexq a, const Complexq &b) { return a -= b; }
    friend Complexq operator*(Complexq a, const Complexq &b) { return a *= b; }
    friend Complexq operator-(const Complexq &a) { return {-a.re, -a.im}; }

    friend Complexq operator/(const Complexq &a, const Complexq &b) {
        Rational n = b.norm();
        if (n == 0) throw std::domain_error("Complexq: division by zero");
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }

    friend bool operator==(const Complexq &a, const Complexq &b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const Complexq &a, const Complexq &b) { return !(a == b); }
};

inline Complexq pow(Complexq base, unsigned long e) {
    Complexq out{Rational(1)};
    while (e > 0) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

inline Rational pow(Rational base, long e) {
    Rational out(1);
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    while (k > 0) {
        if (k & 1) out *= base;
        base *= base;
        k >>= 1;
    }
    if (inv) {
        if (out == 0) throw std::domain_error("pow: negative power of zero");
        out = Rational(1) / out;
    }
    return out;
}

/// Safe two-argument construction: gmp rationals must be canonicalized when
/// built from a raw numerator/denominator pair.
inline Rational make_rational(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational binomial(unsigned long n, unsigned long k) {
    if (k > n) return Rational(0);
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
}

inline Rational factorial(unsigned long n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(f);
}

/// Canonical text form "a/b" for real values, "a/b+c/d*i" otherwise,
/// with the sign folded into the numerators.
inline std::string to_string(const Rational &q) {
    return q.get_str();
}

inline std::string to_string(const Complexq &z) {
    if (z.is_real()) return to_string(z.re);
    std::string s = to_string(z.re);
    if (z.im > 0) s += "+";
    s += to_string(z.im) + "*i";
    return s;
}

/// Parses "p/q", integers, and plain decimal strings ("0.25" -> 1/4) exactly.
inline Rational parse_rational(const std::string &text) {
    if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        Rational q;
        if (q.set_str(text, 10) != 0) throw std::invalid_argument("parse_rational: bad literal '" + text + "'");
        q.canonicalize();
        return q;
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (digits.empty() || frac_len == 0) throw std::invalid_argument("parse_rational: bad literal '" + text + "'");
    mpz_class num;
    if (num.set_str(digits, 10) != 0) throw std::invalid_argument("parse_rational: bad literal '" + text + "'");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    Rational q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace dlwe
