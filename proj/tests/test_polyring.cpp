#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "dlwe/rational.hpp"
#include "dlwe/rst_poly.hpp"
#include "dlwe/sigma_poly.hpp"

using namespace dlwe;

namespace {

std::mt19937_64 &rng() {
    static std::mt19937_64 gen(0xBEEF);
    return gen;
}

Rational random_rational() {
    std::uniform_int_distribution<long> num(-6, 6), den(1, 5);
    return make_rational(num(rng()), den(rng()));
}

Complexq random_complexq() { return {random_rational(), random_rational()}; }

SigmaPoly random_sigma_poly(int max_terms = 8, int max_index = 3) {
    std::uniform_int_distribution<int> nterms(1, max_terms), idx(1, max_index), expo(0, 2), star(0, 1);
    SigmaPoly p;
    int terms = nterms(rng());
    for (int t = 0; t < terms; ++t) {
        SigmaMono m;
        for (int j = 1; j <= max_index; ++j) {
            int e = expo(rng());
            if (e > 0) m.emplace_back(SigmaVar{j, star(rng()) == 1}, static_cast<std::uint32_t>(e));
        }
        std::sort(m.begin(), m.end());
        p += SigmaPoly::monomial(m, random_complexq());
    }
    return p;
}

RstPoly random_rst_poly(int max_terms = 8, int max_exp = 3) {
    std::uniform_int_distribution<int> nterms(1, max_terms), expo(0, max_exp);
    RstPoly p;
    int terms = nterms(rng());
    for (int t = 0; t < terms; ++t)
        p += RstPoly::monomial(RstMono{static_cast<std::uint32_t>(expo(rng())),
                                       static_cast<std::uint32_t>(expo(rng())),
                                       static_cast<std::uint32_t>(expo(rng()))},
                               random_complexq());
    return p;
}

}  // namespace

TEST_CASE("sigma ring basics") {
    SigmaPoly s1 = SigmaPoly::variable(sigma(1));
    SigmaPoly s2 = SigmaPoly::variable(sigma(2));

    CHECK(s1.conj() == SigmaPoly::variable(sigma_star(1)));

    SigmaPoly p = Complexq(Rational(1, 2)) * (s1 * s1) + s2;
    CHECK(p * SigmaPoly::one() == p);
    CHECK(p.weighted_degree() == 2);

    for (int t = 0; t < 50; ++t) {
        SigmaPoly q = random_sigma_poly();
        CHECK(q.conj().conj() == q);
    }
}

TEST_CASE("sigma ring axioms on random triples") {
    for (int t = 0; t < 40; ++t) {
        SigmaPoly a = random_sigma_poly(), b = random_sigma_poly(), c = random_sigma_poly();
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a - a == SigmaPoly::zero());
    }
}

TEST_CASE("weighted degree is additive on products") {
    for (int t = 0; t < 40; ++t) {
        SigmaPoly a = random_sigma_poly(4), b = random_sigma_poly(4);
        if (a.is_zero() || b.is_zero()) continue;
        // additive when top-weight components cannot cancel; single-monomial
        // factors make the check exact
        SigmaPoly am = SigmaPoly::monomial(a.terms().begin()->first, a.terms().begin()->second);
        SigmaPoly bm = SigmaPoly::monomial(b.terms().rbegin()->first, b.terms().rbegin()->second);
        CHECK((am * bm).weighted_degree() == am.weighted_degree() + bm.weighted_degree());
        CHECK((a * b).weighted_degree() <= a.weighted_degree() + b.weighted_degree());
    }
}

TEST_CASE("formal sigma derivative") {
    SigmaPoly s1 = SigmaPoly::variable(sigma(1));
    SigmaPoly p = Complexq(Rational(1, 6)) * (s1 * s1 * s1);
    SigmaPoly half_sq = Complexq(Rational(1, 2)) * (s1 * s1);
    CHECK(p.diff(sigma(1)) == half_sq);
    CHECK(p.diff(sigma(2)) == SigmaPoly::zero());
    CHECK(p.diff(sigma_star(1)) == SigmaPoly::zero());
}

TEST_CASE("substitution images") {
    SigmaSubstitution sub(Rational(1, 2), Rational(1, 2));

    RstPoly img1 = sub.image(sigma(1));
    RstPoly expect1 = RstPoly::monomial(RstMono{1, 0, 0}, Complexq::i()) +
                      RstPoly::monomial(RstMono{0, 1, 0}, Complexq(-1L));
    CHECK(img1 == expect1);  // i*r - s

    CHECK(sub.image(sigma(4)).is_zero());
    CHECK(sub.image(sigma_star(5)).is_zero());

    // sigma_2 at b = omega = 1/2: -2s + 2t + i*s
    RstPoly img2 = sub.image(sigma(2));
    RstPoly expect2 = RstPoly::monomial(RstMono{0, 1, 0}, Complexq(Rational(-2), Rational(1))) +
                      RstPoly::monomial(RstMono{0, 0, 1}, Complexq(Rational(2)));
    CHECK(img2 == expect2);

    // starred images are coefficientwise conjugates
    CHECK(sub.image(sigma_star(2)) == img2.conj());

    CHECK_THROWS_AS(SigmaSubstitution(Rational(0), Rational(1)), ParameterError);
    CHECK_THROWS_AS(SigmaSubstitution(Rational(1), Rational(0)), ParameterError);
}

TEST_CASE("substitution is a ring homomorphism") {
    SigmaSubstitution sub(Rational(1, 2), Rational(2, 3));
    sub.gamma = {Complexq(Rational(1, 3)), Complexq(Rational(0), Rational(1, 2)), Complexq(Rational(-1))};
    for (int t = 0; t < 25; ++t) {
        SigmaPoly a = random_sigma_poly(5, 4), b = random_sigma_poly(5, 4);
        CHECK(substitute_sigma(a * b, sub) == substitute_sigma(a, sub) * substitute_sigma(b, sub));
        CHECK(substitute_sigma(a + b, sub) == substitute_sigma(a, sub) + substitute_sigma(b, sub));
    }
}

TEST_CASE("modulus squared") {
    // |i*r - s|^2 = r^2 + s^2
    RstPoly p = RstPoly::monomial(RstMono{1, 0, 0}, Complexq::i()) +
                RstPoly::monomial(RstMono{0, 1, 0}, Complexq(-1L));
    RstPoly sq = p.modulus_squared();
    RstPoly expect = RstPoly::monomial(RstMono{2, 0, 0}, Complexq(1L)) +
                     RstPoly::monomial(RstMono{0, 2, 0}, Complexq(1L));
    CHECK(sq == expect);
    CHECK(sq.real_flagged());

    // a real-coefficient polynomial squares
    RstPoly q = RstPoly::monomial(RstMono{1, 1, 0}, Complexq(3L)) + RstPoly::one();
    CHECK(q.modulus_squared() == q * q);

    // |p(pt)|^2 pointwise, exactly
    for (int t = 0; t < 10; ++t) {
        RstPoly r = random_rst_poly();
        RstPoly rsq = r.modulus_squared();
        CHECK(rsq.is_real());
        for (int k = 0; k < 10; ++k) {
            Rational x = random_rational(), y = random_rational(), z = random_rational();
            Complexq v = r.evaluate(x, y, z);
            CHECK(rsq.evaluate(x, y, z) == Complexq(v.norm()));
        }
    }
}

TEST_CASE("exact evaluation with independent term-by-term oracle") {
    RstPoly p = RstPoly::monomial(RstMono{2, 0, 0}, Complexq(1L)) +
                RstPoly::monomial(RstMono{0, 2, 0}, Complexq(1L));
    CHECK(p.evaluate(Rational(3), Rational(4), Rational(7)) == Complexq(25L));
    CHECK(RstPoly::zero().evaluate(Rational(1), Rational(2), Rational(3)) == Complexq());

    for (int t = 0; t < 100; ++t) {
        RstPoly q = random_rst_poly();
        Rational x = random_rational(), y = random_rational(), z = random_rational();
        // oracle: plain monomial sum with repeated multiplication
        Complexq expect;
        for (const auto &[m, c] : q.terms()) {
            Rational mono(1);
            for (std::uint32_t k = 0; k < m.r; ++k) mono *= x;
            for (std::uint32_t k = 0; k < m.s; ++k) mono *= y;
            for (std::uint32_t k = 0; k < m.t; ++k) mono *= z;
            expect += c * Complexq(mono);
        }
        CHECK(q.evaluate(x, y, z) == expect);
    }
}

TEST_CASE("rst derivatives") {
    RstPoly p = RstPoly::monomial(RstMono{2, 1, 0}, Complexq(1L));  // r^2 s
    CHECK(p.diff(RstVar::R) == RstPoly::monomial(RstMono{1, 1, 0}, Complexq(2L)));

    RstPoly q = RstPoly::monomial(RstMono{2, 0, 0}, Complexq(1L)) +
                RstPoly::monomial(RstMono{0, 2, 0}, Complexq(1L));
    CHECK(q.diff(RstVar::R).diff(RstVar::S) == RstPoly::zero());

    for (int t = 0; t < 30; ++t) {
        RstPoly f = random_rst_poly();
        CHECK(f.diff(RstVar::R).diff(RstVar::S) == f.diff(RstVar::S).diff(RstVar::R));
    }
}

TEST_CASE("rst derivative against central finite differences") {
    for (int t = 0; t < 10; ++t) {
        RstPoly f = random_rst_poly(6, 3);
        RstPoly fr = f.diff(RstVar::R);
        double h = 1e-5;
        for (int k = 0; k < 5; ++k) {
            double x = 0.3 * k - 0.7, y = 0.2 * k + 0.1, z = 0.5;
            std::complex<double> fd = (f.evaluate(x + h, y, z) - f.evaluate(x - h, y, z)) / (2 * h);
            std::complex<double> an = fr.evaluate(x, y, z);
            CHECK(std::abs(fd - an) < 1e-6 * (1.0 + std::abs(an)));
        }
    }
}

TEST_CASE("time specialization and Horner compilation") {
    RstPoly f = random_rst_poly(10, 4);
    Rational t0(7, 3);
    RstPoly g = f.at_time(t0);
    CHECK(g.degree(RstVar::T) <= 0);
    for (int k = 0; k < 10; ++k) {
        Rational x = random_rational(), y = random_rational();
        CHECK(g.evaluate(x, y, Rational(0)) == f.evaluate(x, y, t0));
    }

    Horner2D<std::complex<double>> h(g);
    for (int k = 0; k < 10; ++k) {
        double x = 0.17 * k - 0.9, y = 1.3 - 0.31 * k;
        std::complex<double> direct = g.evaluate(x, y, 0.0);
        std::complex<double> horner = h(x, y);
        CHECK(std::abs(direct - horner) <= 1e-12 * (1.0 + h.magnitude_bound(x, y)));
    }
}

TEST_CASE("canonical text form") {
    SigmaPoly p = Complexq(Rational(1, 2)) * (SigmaPoly::variable(sigma(1)) * SigmaPoly::variable(sigma(1))) +
                  SigmaPoly::variable(sigma(2));
    CHECK(p.to_canonical_string() == "(1)*s2 + (1/2)*s1^2");

    RstPoly q = RstPoly::monomial(RstMono{1, 0, 0}, Complexq::i()) +
                RstPoly::monomial(RstMono{0, 1, 0}, Complexq(-1L));
    CHECK(q.to_canonical_string() == "(-1)*s + (0+1*i)*r");
}
