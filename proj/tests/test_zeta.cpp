#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/constants/constants.hpp>
#include <random>

#include "divlab/zeta.hpp"
#include "oracles.hpp"

using namespace divlab;
using divlab::testing::borwein_zeta;
using divlab::testing::stieltjes_via_eta;

TEST_CASE("bernoulli numbers") {
    CHECK(bernoulli_number(0) == Rational(1));
    CHECK(bernoulli_number(1) == Rational(-1, 2));
    CHECK(bernoulli_number(2) == Rational(1, 6));
    CHECK(bernoulli_number(3) == Rational(0));
    CHECK(bernoulli_number(4) == Rational(-1, 30));
    CHECK(bernoulli_number(10) == Rational(5, 66));
    CHECK(bernoulli_number(12) == Rational(-691, 2730));
}

TEST_CASE("zeta values against independent oracles") {
    // classical value through pi
    const Real pi = boost::math::constants::pi<Real>();
    CHECK(abs(zeta_value(Rational(2)) - pi * pi / 6) < 1e-70);

    // alternating-series oracle at assorted real points
    for (const Rational& q : {Rational(1, 2), Rational(3, 2), Rational(2), Rational(3),
                              Rational(1, 4), Rational(4, 3), Rational(10)}) {
        CAPTURE(q);
        CHECK(abs(zeta_value(q) - borwein_zeta(to_real(q))) < 1e-70);
    }

    // spec-level decimal anchor
    CHECK(abs(zeta_value(Rational(1, 2)) -
              Real("-1.4603545088095868128894991525152980124672293310126")) < 1e-45);

    CHECK_THROWS_AS(zeta_value(Rational(1)), ConfigError);
}

TEST_CASE("stieltjes constants") {
    const Real gamma = stieltjes(0);
    CHECK(abs(gamma - boost::math::constants::euler<Real>()) < 1e-70);
    CHECK(abs(gamma - Real("0.5772156649015328606065120900824024310421593359399")) < 1e-45);

    // eta-function oracle, fully independent of the Euler-Maclaurin kernel
    const auto oracle = stieltjes_via_eta(6);
    for (int m = 0; m < 6; ++m) {
        CAPTURE(m);
        CHECK(abs(stieltjes(m) - oracle[m]) < 1e-40);
    }
}

TEST_CASE("laurent expansion of zeta") {
    SUBCASE("pole structure at 1") {
        LaurentSeries z = zeta_laurent(Rational(1), 4);
        CHECK(z.lo() == -1);
        CHECK(abs(z.coeff(-1) - 1) < 1e-80);
        CHECK(abs(z.coeff(0) - stieltjes(0)) < 1e-60);
        CHECK(abs(z.coeff(1) + stieltjes(1)) < 1e-60); // -gamma_1
    }

    SUBCASE("derivative at a regular point vs central differences of the oracle") {
        LaurentSeries z = zeta_laurent(Rational(2), 2);
        const Real h("1e-25");
        const Real der = (borwein_zeta(Real(2) + h) - borwein_zeta(Real(2) - h)) / (2 * h);
        CHECK(abs(z.coeff(1) - der) < 1e-45);
        const Real der2 = (borwein_zeta(Real(2) + h) - 2 * borwein_zeta(Real(2)) +
                           borwein_zeta(Real(2) - h)) /
                          (h * h);
        CHECK(abs(z.coeff(2) - der2 / 2) < 1e-40);
    }

    SUBCASE("depth doubling stays within stated error bounds") {
        ZetaKernelConfig deep;
        deep.em_terms = 400;
        deep.bernoulli_pairs = 50;
        for (const Rational& q : {Rational(1), Rational(1, 2), Rational(3, 2)}) {
            LaurentSeries a = zeta_laurent(q, 8);
            LaurentSeries b = zeta_laurent(q, 8, 50, deep);
            for (int o = a.lo(); o <= 8; ++o) {
                CAPTURE(q);
                CAPTURE(o);
                CHECK(abs(a.coeff(o) - b.coeff(o)) <= a.error(o) + b.error(o));
            }
        }
    }

    SUBCASE("unattainable precision raises") {
        ZetaKernelConfig shallow;
        shallow.em_terms = 8;
        shallow.bernoulli_pairs = 4;
        CHECK_THROWS_AS(zeta_laurent(Rational(1, 2), 10, 60, shallow), NumericError);
    }

    SUBCASE("order cap") {
        CHECK_THROWS_AS(zeta_laurent(Rational(2), 31), ConfigError);
    }
}

TEST_CASE("laurent arithmetic") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);

    auto random_series = [&](int lo, int len) {
        std::vector<Real> c(len), e(len, Real(1e-60));
        for (auto& v : c)
            v = Real(coef(rng));
        return LaurentSeries(Rational(0), lo, std::move(c), std::move(e));
    };

    SUBCASE("product residue is invariant under operand reordering") {
        for (int trial = 0; trial < 20; ++trial) {
            LaurentSeries a = random_series(-1, 8);
            LaurentSeries b = random_series(-1, 8);
            LaurentSeries c = random_series(0, 8);
            LaurentSeries p1 = (a * b) * c;
            LaurentSeries p2 = (c * a) * b;
            LaurentSeries p3 = a * (b * c);
            CHECK(abs(p1.residue() - p2.residue()) <=
                  p1.residue_error() + p2.residue_error());
            CHECK(abs(p1.residue() - p3.residue()) <=
                  p1.residue_error() + p3.residue_error());
            CHECK(p1.lo() == -2);
        }
    }

    SUBCASE("validity windows shrink correctly") {
        LaurentSeries a = random_series(-1, 6); // orders -1..4
        LaurentSeries b = random_series(-2, 4); // orders -2..1
        LaurentSeries p = a * b;
        CHECK(p.lo() == -3);
        CHECK(p.top() == 0); // min(-1 + 1, -2 + 4)
        LaurentSeries s = a + b;
        CHECK(s.lo() == -2);
        CHECK(s.top() == 1);
    }

    SUBCASE("rescale moves orders by powers of the factor") {
        std::vector<Real> c{Real(3), Real(5)}, e{Real(0), Real(0)};
        LaurentSeries a(Rational(1), -1, std::move(c), std::move(e));
        LaurentSeries r = a.rescaled(Real(2), Rational(1, 2));
        CHECK(abs(r.coeff(-1) - Real(3) / 2) < 1e-70);
        CHECK(abs(r.coeff(0) - 5) < 1e-70);
        CHECK(r.center() == Rational(1, 2));
    }
}
