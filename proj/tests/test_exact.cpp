#include <catch2/catch_amalgamated.hpp>

#include <heatlab/exact.hpp>
#include <heatlab/real.hpp>

using namespace heatlab;

TEST_CASE("to_rational is exact on dyadic reals") {
    CHECK(to_rational(Real(0)) == Rational(0));
    CHECK(to_rational(Real(1) / 2) == Rational(1, 2));
    CHECK(to_rational(Real(-3) / 8) == Rational(-3, 8));
    CHECK(to_rational(Real(7)) == Rational(7));
    // 0.3 is not dyadic; the conversion must reproduce the stored value bit
    // for bit, so converting back must round-trip
    Rational r = to_rational(Real(3) / 10);
    CHECK(Real(static_cast<Real>(numerator(r)) / static_cast<Real>(denominator(r))) ==
          Real(3) / 10);
}

TEST_CASE("pi-half polynomial algebra") {
    PiHalfPoly zero;
    PiHalfPoly one(Rational(1));
    PiHalfPoly pi2 = PiHalfPoly::term(1, 2);       // pi
    PiHalfPoly inv_pi = PiHalfPoly::term(1, -2);   // 1/pi
    PiHalfPoly root = PiHalfPoly::term(1, 1);      // sqrt(pi)

    CHECK(zero == PiHalfPoly(Rational(0)));
    CHECK(pi2 * inv_pi == one);
    CHECK(root * root == pi2);
    CHECK((pi2 + pi2) == pi2 * Rational(2));
    CHECK(pi2 - pi2 == zero);
    CHECK((one + pi2) * (one - pi2) == one - pi2 * pi2);

    // numeric evaluation agrees with the working-precision pi
    Real p = pi();
    CHECK(abs(pi2.eval() - p) == 0);
    CHECK(abs((pi2 * pi2).eval() - p * p) < Real("1e-45"));
    CHECK(abs(root.eval() - sqrt(p)) < Real("1e-45"));
}

TEST_CASE("pi-half polynomial rendering") {
    CHECK(PiHalfPoly().to_string() == "0");
    CHECK(PiHalfPoly(Rational(7, 6)).to_string() == "7/6");
    CHECK(PiHalfPoly::term(Rational(-1, 4), -2).to_string() == "-1/4*pi^(-1)");
    CHECK(PiHalfPoly::term(2, 2).to_string() == "2*pi");
    CHECK(PiHalfPoly::term(1, 1).to_string() == "1*pi^(1/2)");
    PiHalfPoly mixed = PiHalfPoly(Rational(-1)) + PiHalfPoly::term(Rational(-1, 4), -2);
    CHECK(mixed.to_string() == "-1 - 1/4*pi^(-1)");
}

TEST_CASE("even Bernoulli numbers against the classical table") {
    CHECK(bernoulli_even(0) == Rational(1));
    CHECK(bernoulli_even(2) == Rational(1, 6));
    CHECK(bernoulli_even(4) == Rational(-1, 30));
    CHECK(bernoulli_even(6) == Rational(1, 42));
    CHECK(bernoulli_even(8) == Rational(-1, 30));
    CHECK(bernoulli_even(10) == Rational(5, 66));
    CHECK(bernoulli_even(12) == Rational(-691, 2730));
}

TEST_CASE("display helpers") {
    CHECK(to_display_string(Real(1) / 4, 10) == "0.25");
    // full-precision output survives a parse round-trip
    Real x = pi() / 7;
    CHECK(Real(to_full_string(x)) == x);
}
