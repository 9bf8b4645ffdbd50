#include <catch2/catch_amalgamated.hpp>

#include <heatlab/asymptotics.hpp>
#include <heatlab/heat.hpp>

using namespace heatlab;

TEST_CASE("synthetic expansion round-trips through the fit") {
    // exact model 0.7 t^-1 - 1.3 + 0.41 t + 2.2 t^2 in dimension m = 2
    Ladder ladder = parse_ladder("0.03:0.7:14");
    std::vector<std::pair<Real, Real>> pts;
    for (const Real& t : ladder.points())
        pts.emplace_back(t, Real(7) / 10 / t - Real(13) / 10 + Real(41) / 100 * t +
                                Real(11) / 5 * t * t);
    FitResult fit = fit_expansion(pts, 2, 6);
    CHECK(abs(fit.coeff.at(0) - Real(7) / 10) < Real("1e-14"));
    CHECK(abs(fit.coeff.at(2) + Real(13) / 10) < Real("1e-14"));
    CHECK(abs(fit.coeff.at(4) - Real(41) / 100) < Real("1e-12"));
    CHECK(abs(fit.coeff.at(6) - Real(11) / 5) < Real("1e-10"));
    CHECK(fit.orders == std::vector<int>{0, 2, 4, 6});
    for (int n : fit.orders) {
        CHECK(fit.uncertainty.at(n) > 0);
        CHECK(fit.uncertainty.at(n) < Real("1e-10"));
    }
    CHECK(fit.rows_used <= fit.rows_total);
    CHECK(fit.basis_size == 7);  // 0..6 plus three guard orders
}

TEST_CASE("fit refuses bad inputs") {
    std::vector<std::pair<Real, Real>> few = {{Real(1), Real(1)}, {Real(2), Real(1)}};
    CHECK_THROWS_AS(fit_expansion(few, 2, 4), Error);  // far too few rows

    CHECK_THROWS_AS(fit_expansion(few, 2, 3), Error);  // odd n_max

    std::vector<std::pair<Real, Real>> degen(14, {Real(1) / 2, Real(3)});
    CHECK_THROWS_AS(fit_expansion(degen, 2, 4), Error);  // identical rows, singular design

    std::vector<std::pair<Real, Real>> negative(14, {Real(-1), Real(1)});
    CHECK_THROWS_AS(fit_expansion(negative, 2, 4), Error);
}

TEST_CASE("Landau-ladder oracle: exact coefficients") {
    // d = 1, A = 1: A_0 = -1/(4 pi), A_2 = 1/2, A_4 = -pi/3, A_6 = 0,
    // A_8 = 64 pi^3 / 720
    auto o1 = bernoulli_oracle(1, Rational(1), 8);
    CHECK(o1.at(0) == PiHalfPoly::term(Rational(-1, 4), -2));
    CHECK(o1.at(2) == PiHalfPoly(Rational(1, 2)));
    CHECK(o1.at(4) == PiHalfPoly::term(Rational(-1, 3), 2));
    CHECK(o1.at(6) == PiHalfPoly());
    CHECK(o1.at(8) == PiHalfPoly::term(Rational(64, 720), 6));

    // d = 2: x = 2B/pi doubles, A_4 = -4 pi / 3
    auto o2 = bernoulli_oracle(2, Rational(1), 4);
    CHECK(o2.at(2) == PiHalfPoly(Rational(1)));
    CHECK(o2.at(4) == PiHalfPoly::term(Rational(-4, 3), 2));

    // area rescales x = 4d/A
    auto oa = bernoulli_oracle(1, Rational(2), 4);
    CHECK(oa.at(0) == PiHalfPoly::term(Rational(-1, 2), -2));
    CHECK(oa.at(4) == PiHalfPoly::term(Rational(-1, 6), 2));

    // negative degree: A_2 flips sign, A_4 is even in d
    auto om = bernoulli_oracle(-1, Rational(1), 4);
    CHECK(om.at(2) == PiHalfPoly(Rational(-1, 2)));
    CHECK(om.at(4) == PiHalfPoly::term(Rational(-1, 3), 2));

    // degree zero: only the volume term survives
    auto oz = bernoulli_oracle(0, Rational(1), 8);
    CHECK(oz.at(0) == PiHalfPoly::term(Rational(-1, 4), -2));
    for (int n = 2; n <= 8; n += 2) CHECK(oz.at(n) == PiHalfPoly());

    CHECK_THROWS_AS(bernoulli_oracle(1, Rational(-1), 4), Error);
}

TEST_CASE("deformed-circle oracle: exact coefficients") {
    // default circle L = 2 pi, a^2 = 1/4:
    //   A_{2k} = 2 pi (-1/4)^k / (2 k!) * pi^(-1/2) = (-1/4)^k / k! * pi^(1/2)
    auto o = circle_oracle(PiHalfPoly::term(2, 2), Rational(1, 4), 4);
    CHECK(o.at(0) == PiHalfPoly::term(1, 1));
    CHECK(o.at(2) == PiHalfPoly::term(Rational(-1, 4), 1));
    CHECK(o.at(4) == PiHalfPoly::term(Rational(1, 32), 1));

    // rational circumference stays rational over pi^(-1/2)
    auto r = circle_oracle(PiHalfPoly(Rational(5)), Rational(0), 2);
    CHECK(r.at(0) == PiHalfPoly::term(Rational(5, 2), -1));
    CHECK(r.at(2) == PiHalfPoly());
}

TEST_CASE("fitted torus derived trace matches the oracle through order 8") {
    TorusBlock t1;
    t1.bundle_degree = 1;
    GeometrySpec spec;
    spec.blocks = {t1};
    Ladder ladder = parse_ladder("0.03:0.7:14");
    const Real eps("1e-25");
    FactoredTrace ft(block_spectra(spec, ComplexKind::Dolbeault, ladder.t_min(), eps), eps);
    Aggregate der = parse_aggregate("derived");
    std::vector<std::pair<Real, Real>> pts;
    for (const Real& t : ladder.points()) pts.emplace_back(t, ft.evaluate(t, der).value);
    FitResult fit = fit_expansion(pts, 2, 8);
    auto oracle = bernoulli_oracle(1, Rational(1), 8);
    CHECK(abs(fit.coeff.at(0) - oracle.at(0).eval()) < Real("1e-12"));
    CHECK(abs(fit.coeff.at(2) - oracle.at(2).eval()) < Real("1e-10"));
    CHECK(abs(fit.coeff.at(4) - oracle.at(4).eval()) < Real("1e-8"));
    CHECK(abs(fit.coeff.at(6) - 0) < Real("1e-7"));
    CHECK(abs(fit.coeff.at(8) - oracle.at(8).eval()) < Real("1e-6"));
}

TEST_CASE("guard orders protect the reported window") {
    // data carrying a strong order-8 term must not pollute A_0..A_4 when only
    // n_max = 4 is requested: the guards absorb it
    Ladder ladder = parse_ladder("0.05:0.7:14");
    std::vector<std::pair<Real, Real>> pts;
    for (const Real& t : ladder.points())
        pts.emplace_back(t, Real(1) / t - 2 + 5 * t * t * t);  // orders 0, 2, 8
    FitResult fit = fit_expansion(pts, 2, 4);
    CHECK(abs(fit.coeff.at(0) - 1) < Real("1e-12"));
    CHECK(abs(fit.coeff.at(2) + 2) < Real("1e-10"));
    CHECK(abs(fit.coeff.at(4) - 0) < Real("1e-8"));
    CHECK(fit.coeff.count(8) == 0);  // guards are never reported
}
