#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "dlwe/heat.hpp"

using namespace dlwe;

namespace {
Rational rq(long n, long d = 1) { return make_rational(n, d); }
}

TEST_CASE("first heat polynomials") {
    HeatPoly h0 = heat_poly(0);
    CHECK(h0.terms() == HeatPoly::TermMap{{{0, 0}, rq(1)}});

    HeatPoly h1 = heat_poly(1);
    CHECK(h1.terms() == HeatPoly::TermMap{{{1, 0}, rq(1)}});

    HeatPoly h2 = heat_poly(2);
    CHECK(h2.terms() == HeatPoly::TermMap{{{2, 0}, rq(1, 2)}, {{0, 1}, rq(1)}});

    HeatPoly h3 = heat_poly(3);
    CHECK(h3.terms() == HeatPoly::TermMap{{{3, 0}, rq(1, 6)}, {{1, 1}, rq(1)}});

    CHECK(heat_poly(-2).is_zero());
}

TEST_CASE("heat derivative identities up to order 15") {
    for (long r = 1; r <= 15; ++r) CHECK(heat_poly(r).diff_rho() == heat_poly(r - 1));
    for (long r = 2; r <= 15; ++r) CHECK(heat_poly(r).diff_nu() == heat_poly(r - 2));
    CHECK(heat_poly(1).diff_nu().is_zero());
}

TEST_CASE("generating function: exp(a*rho + a^2*nu) through order 12") {
    // independent series oracle: Cauchy product of the truncated alpha-series
    // of exp(alpha*rho) and exp(alpha^2*nu)
    const long order = 12;
    std::vector<HeatPoly> exp_rho(order + 1), exp_nu(order + 1);
    for (long a = 0; a <= order; ++a)
        exp_rho[a] = HeatPoly::monomial(a, 0, rq(1) / factorial(static_cast<unsigned long>(a)));
    for (long r = 0; r <= order; ++r)
        exp_nu[r] = (r % 2 == 0)
                        ? HeatPoly::monomial(0, r / 2, rq(1) / factorial(static_cast<unsigned long>(r / 2)))
                        : HeatPoly::zero();

    for (long r = 0; r <= order; ++r) {
        HeatPoly conv;
        for (long u = 0; u <= r; ++u) conv += exp_rho[u] * exp_nu[r - u];
        CHECK(conv == heat_poly(r));
    }
}

TEST_CASE("nu branch selection") {
    CHECK(nu_of_t(rq(1, 2), -5.0) == rq(2));
    CHECK(nu_of_t(rq(1, 2), 5.0) == rq(-2));
    CHECK(nu_of_t(rq(1), 0.0) == rq(-1));
    CHECK_THROWS_AS(nu_of_t(rq(0), 1.0), ParameterError);
}

TEST_CASE("scaled Schur polynomials converge to heat polynomials") {
    SolutionSpec spec(Partition({1, 1}), rq(1, 2), rq(1, 2));
    SchurTable table(6);
    // sample points sit away from the zero set of H_1..H_5 (|H_{n-3}/H_n|
    // below ~3/4) so the relative error is well defined; the leading
    // correction scales like |t|^{-1/2}, which the 400 -> 1600 ratio checks
    std::vector<std::complex<double>> rhos = {
        {7.5, 0.1}, {-7.5, -0.1}, {8.0, 0.05}, {-8.5, 0.05}, {9.0, -0.1}};
    for (double tmag : {400.0, -400.0}) {
        for (long n = 1; n <= 5; ++n) {
            HeatPoly h = heat_poly(n);
            for (auto rho : rhos) {
                double nu400 = nu_of_t(spec.omega, tmag).get_d();
                std::complex<double> target = h.evaluate(rho, nu400);
                double err400 = std::abs(schur_heat_ratio(table, spec, n, rho, tmag) - target);
                CHECK(err400 <= 0.05 * std::abs(target));
                double err1600 = std::abs(schur_heat_ratio(table, spec, n, rho, 4 * tmag) - target);
                CHECK(err1600 <= 0.55 * err400 + 1e-12 * std::abs(target));
            }
        }
    }
}
