#include <catch2/catch_amalgamated.hpp>

#include <heatlab/geometry.hpp>

using namespace heatlab;

TEST_CASE("geometry parsing applies defaults") {
    GeometrySpec s = parse_geometry(R"({"blocks":[{"kind":"complex_torus","area":2}]})");
    REQUIRE(s.blocks.size() == 1);
    const auto& t = std::get<TorusBlock>(s.blocks[0]);
    CHECK(t.area == 2);
    CHECK(t.modulus_re == 0);
    CHECK(t.modulus_im == 1);
    CHECK(t.bundle_degree == 0);
    CHECK(t.novikov_re == 0);
    CHECK(t.novikov_im == 0);

    GeometrySpec c = parse_geometry(R"({"blocks":[{"kind":"circle","circumference":5}]})");
    CHECK(std::get<CircleBlock>(c.blocks[0]).witten_a == 0);
}

TEST_CASE("geometry parsing validates") {
    CHECK_THROWS_AS(parse_geometry("{}"), Error);
    CHECK_THROWS_AS(parse_geometry(R"({"blocks":[]})"), Error);
    CHECK_THROWS_AS(parse_geometry(R"({"blocks":[{"kind":"klein_bottle"}]})"), Error);
    CHECK_THROWS_AS(parse_geometry(R"({"blocks":[{"kind":"sphere"}]})"), Error);
    CHECK_THROWS_AS(parse_geometry(R"({"blocks":[{"kind":"sphere","radius":-1}]})"), Error);
    CHECK_THROWS_AS(parse_geometry(R"({"blocks":[{"kind":"circle","circumference":0}]})"), Error);
    CHECK_THROWS_AS(parse_geometry(R"({"blocks":[{"kind":"complex_torus","area":1,"modulus":[0,-1]}]})"),
                    Error);
    CHECK_THROWS_AS(parse_geometry(R"({"blocks":[{"kind":"complex_torus","area":1,"modulus":[1]}]})"),
                    Error);
    CHECK_THROWS_AS(parse_geometry(R"({"blocks":[{"kind":"complex_torus","area":1,"bundle_degree":1.5}]})"),
                    Error);
    CHECK_THROWS_AS(parse_geometry("not json"), Error);
}

TEST_CASE("geometry JSON round-trip") {
    GeometrySpec s = parse_geometry(
        R"({"blocks":[{"kind":"sphere","radius":2},
                      {"kind":"complex_torus","area":1,"modulus":[0.5,2],"bundle_degree":-3,
                       "novikov_c":[0.25,0.125]},
                      {"kind":"circle","circumference":6.5,"witten_a":0.5}]})");
    GeometrySpec back = parse_geometry_json(geometry_to_json(s));
    REQUIRE(back.blocks.size() == 3);
    CHECK(std::get<SphereBlock>(back.blocks[0]).radius == 2);
    const auto& t = std::get<TorusBlock>(back.blocks[1]);
    CHECK(t.modulus_re == Real(1) / 2);
    CHECK(t.bundle_degree == -3);
    CHECK(t.novikov_im == Real(1) / 8);
    CHECK(std::get<CircleBlock>(back.blocks[2]).witten_a == Real(1) / 2);
    CHECK(describe(back) == describe(s));
}

TEST_CASE("dimension and admissibility") {
    GeometrySpec s = parse_geometry(
        R"({"blocks":[{"kind":"sphere","radius":1},{"kind":"circle","circumference":5}]})");
    CHECK(s.real_dimension() == 3);
    CHECK_FALSE(s.complex_admissible());
    CHECK_THROWS_AS(s.complex_dimension(), Error);

    GeometrySpec k = parse_geometry(
        R"({"blocks":[{"kind":"sphere","radius":1},{"kind":"complex_torus","area":1}]})");
    CHECK(k.real_dimension() == 4);
    CHECK(k.complex_admissible());
    CHECK(k.complex_dimension() == 2);
}

TEST_CASE("exact per-block characteristic data") {
    GeometrySpec s;
    s.blocks = {SphereBlock{}};
    CharRecord rec = char_record(s);
    CHECK(rec.m == 2);
    CHECK(rec.euler == 2);
    // unit sphere: volume 4 pi, scalar curvature integral 8 pi
    CHECK(rec.blocks[0].volume == PiHalfPoly::term(4, 2));
    CHECK(rec.blocks[0].integral_tau == PiHalfPoly::term(8, 2));
    CHECK(rec.blocks[0].c1_tangent == 2);

    // default circle keeps its circumference 2 pi in closed form
    GeometrySpec c;
    c.blocks = {CircleBlock{}};
    CHECK(char_record(c).blocks[0].volume == PiHalfPoly::term(2, 2));
    CHECK(char_record(c).euler == 0);

    GeometrySpec t = parse_geometry(
        R"({"blocks":[{"kind":"complex_torus","area":3,"bundle_degree":2}]})");
    CharRecord tr = char_record(t);
    CHECK(tr.blocks[0].volume == PiHalfPoly(Rational(3)));
    CHECK(tr.blocks[0].integral_tau == PiHalfPoly());
    CHECK(tr.blocks[0].c1_tangent == 0);
    CHECK(tr.blocks[0].c1_bundle == 2);

    GeometrySpec prod;
    prod.blocks = {SphereBlock{}, SphereBlock{}};
    CharRecord pr = char_record(prod);
    CHECK(pr.euler == 4);
    CHECK(pr.total_volume == PiHalfPoly::term(16, 4));
}

TEST_CASE("describe labels") {
    GeometrySpec s = parse_geometry(
        R"({"blocks":[{"kind":"sphere","radius":1},{"kind":"complex_torus","area":1,"bundle_degree":1}]})");
    CHECK(describe(s) == "S2 x T[d=1]");
    GeometrySpec d = parse_geometry(
        R"({"blocks":[{"kind":"complex_torus","area":1,"novikov_c":[0.3,0.2]}]})");
    CHECK(describe(d) == "T[d=0,c=0.3+0.2i]");
}
