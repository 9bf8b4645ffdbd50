// Suite orchestration: check selection, config parsing, report formats,
// and the failure paths (bad pairings throw, computation errors become
// failed results with a note).

#include <catch2/catch_amalgamated.hpp>

#include "heatlab/verify.hpp"

using namespace heatlab;

TEST_CASE("suite selection honors ids and geometry filters") {
    VerifyConfig cfg;
    SuiteResult two = run_suite({"MS-CONST"}, {"s1", "t0"}, cfg);
    REQUIRE(two.checks.size() == 2);
    CHECK(two.checks[0].id == "MS-CONST");
    CHECK(two.checks[0].geometry_name == "s1");
    CHECK(two.checks[1].geometry_name == "t0");
    CHECK(two.checks[0].pass);
    CHECK(two.checks[1].pass);
    CHECK(two.all_pass);

    // empty id list and the "all" sentinel both mean the full catalogue
    SuiteResult full = run_suite({}, {"s2"}, cfg);
    SuiteResult all = run_suite({"all"}, {"s2"}, cfg);
    REQUIRE(full.checks.size() == all.checks.size());
    CHECK(full.checks.size() >= 3);
    auto order = all_check_ids();
    size_t last = 0;
    for (const auto& c : full.checks) {
        CHECK(c.geometry_name == "s2");
        size_t pos = std::find(order.begin(), order.end(), c.id) - order.begin();
        REQUIRE(pos < order.size());
        CHECK(pos >= last);  // catalogue order
        last = pos;
    }
}

TEST_CASE("unknown ids or geometries are errors, disjoint filters are empty") {
    VerifyConfig cfg;
    CHECK_THROWS_AS(run_suite({"NO-SUCH-CHECK"}, {}, cfg), Error);
    CHECK_THROWS_AS(run_suite({"MS-CONST"}, {"mars"}, cfg), Error);
    CHECK_THROWS_AS(battery_geometry("mars"), Error);
    CHECK_THROWS_AS(run_check("NO-SUCH-CHECK", battery_geometry("s2"), cfg), Error);

    // valid names whose batteries do not intersect: no checks, vacuous pass
    SuiteResult none = run_suite({"WITTEN-SHIFT"}, {"s2"}, cfg);
    CHECK(none.checks.empty());
    CHECK(none.all_pass);
}

TEST_CASE("catalogue lists every check once, in order") {
    auto ids = all_check_ids();
    std::vector<std::string> expected = {
        "MS-CONST",         "RR-CONST",          "INDEX-VANISH",
        "DERHAM-DERIVED-VANISH", "DERHAM-DERIVED-TOP", "DOL-DERIVED-TOP",
        "DOL-SUBLEADING",   "PRODUCT-EXACT",     "RESTRICT-CIRCLE",
        "WITTEN-SHIFT",     "NOVIKOV-INV",       "L26-SPHERE"};
    CHECK(ids == expected);
    for (const auto& id : ids) CHECK(check_definition(id).id == id);
}

TEST_CASE("a Dolbeault check on a circle geometry throws a pairing error") {
    VerifyConfig cfg;
    CHECK_THROWS_AS(run_check("RR-CONST", battery_geometry("s1"), cfg), PairingError);
    CHECK_THROWS_AS(run_check("DOL-DERIVED-TOP", battery_geometry("s1xs1"), cfg), PairingError);
}

TEST_CASE("a computation failure is a failed result with a note, not a throw") {
    VerifyConfig cfg;
    cfg.fit_ladder.count = 3;  // too few rows for any fit
    CheckResult r = run_check("L26-SPHERE", "s2", battery_geometry("s2"), cfg);
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.note.empty());
}

TEST_CASE("an absurd tolerance fails the check without raising") {
    VerifyConfig cfg;
    cfg.tol_fitted = Real("1e-30");
    SuiteResult s = run_suite({"L26-SPHERE"}, {"s2"}, cfg);
    REQUIRE(s.checks.size() == 1);
    CHECK_FALSE(s.checks[0].pass);
    CHECK(s.checks[0].note.empty());  // honest failure, no exception involved
    CHECK_FALSE(s.all_pass);
}

TEST_CASE("config json round-trips and accepts partial overrides") {
    VerifyConfig def;
    VerifyConfig back = parse_config_json(config_to_json(def));
    CHECK(back.precision_digits == def.precision_digits);
    CHECK(back.trace_ladder.t0 == def.trace_ladder.t0);
    CHECK(back.trace_ladder.ratio == def.trace_ladder.ratio);
    CHECK(back.trace_ladder.count == def.trace_ladder.count);
    CHECK(back.fit_ladder.t0 == def.fit_ladder.t0);
    CHECK(back.eps_tail == def.eps_tail);
    CHECK(back.tol_exact == def.tol_exact);
    CHECK(back.tol_fitted == def.tol_fitted);
    CHECK(back.tol_deform == def.tol_deform);

    VerifyConfig c1 = parse_config_json(Json{{"tol_fitted", "1e-9"}});
    CHECK(c1.tol_fitted == Real("1e-9"));
    CHECK(c1.tol_exact == def.tol_exact);  // untouched fields keep defaults

    VerifyConfig c2 = parse_config_json(Json{{"fit_ladder", "0.1:0.5:9"}});
    CHECK(c2.fit_ladder.t0 == Real(1) / 10);
    CHECK(c2.fit_ladder.ratio == Real(1) / 2);
    CHECK(c2.fit_ladder.count == 9);

    VerifyConfig c3 = parse_config_json(Json{{"trace_ladder", Json{{"t0", "0.25"}, {"count", 7}}}});
    CHECK(c3.trace_ladder.t0 == Real(1) / 4);
    CHECK(c3.trace_ladder.ratio == def.trace_ladder.ratio);
    CHECK(c3.trace_ladder.count == 7);
}

TEST_CASE("config parsing rejects unknown or out-of-range fields") {
    CHECK_THROWS_AS(parse_config_json(Json{{"tol_typo", 1}}), Error);
    CHECK_THROWS_AS(parse_config_json(Json{{"precision_digits", 5}}), Error);
    CHECK_THROWS_AS(parse_config_json(Json{{"precision_digits", 10000}}), Error);
    CHECK_THROWS_AS(parse_config_json(Json{{"fit_ladder", "0.5:1.2:9"}}), Error);
    CHECK_THROWS_AS(parse_config_json(Json{{"tol_exact", "zz"}}), Error);
    CHECK_THROWS_AS(parse_config_json(Json::array()), Error);
}

TEST_CASE("json report carries the full schema") {
    VerifyConfig cfg;
    SuiteResult s = run_suite({"MS-CONST", "RR-CONST"}, {"s2"}, cfg);
    REQUIRE(s.checks.size() == 2);
    Json rep = report_json(s, cfg);
    CHECK(rep["engine"] == "heatlab");
    for (const char* key : {"precision_digits", "trace_ladder", "fit_ladder", "eps_tail",
                            "tol_exact", "tol_fitted", "tol_deform"})
        CHECK(rep["config"].contains(key));
    REQUIRE(rep["checks"].size() == 2);
    const Json& c0 = rep["checks"][0];
    for (const char* key : {"id", "geometry", "geometry_description", "complex", "description",
                            "predicted", "computed", "error", "uncertainty", "tolerance",
                            "truncation_budget_used", "pass", "wall_ms", "rows"})
        CHECK(c0.contains(key));
    CHECK(c0["id"] == "MS-CONST");
    CHECK(c0["complex"] == "derham");
    CHECK(c0["predicted"]["exact"] == "2");
    CHECK(c0["pass"] == true);
    REQUIRE(c0["rows"].is_array());
    REQUIRE(!c0["rows"].empty());
    for (const char* key : {"label", "predicted", "computed", "error", "noise", "tolerance"})
        CHECK(c0["rows"][0].contains(key));
    CHECK(rep["checks"][1]["complex"] == "dolbeault");
    CHECK(rep["checks"][1]["predicted"]["exact"] == "1");
    CHECK(rep["summary"]["total"] == 2);
    CHECK(rep["summary"]["passed"] == 2);
    CHECK(rep["summary"]["failed"] == 0);
    CHECK(rep["summary"]["all_pass"] == true);
}

TEST_CASE("reports are deterministic once wall time is erased") {
    VerifyConfig cfg;
    auto strip = [&](SuiteResult s) {
        Json rep = report_json(s, cfg);
        for (auto& c : rep["checks"]) c.erase("wall_ms");
        return rep.dump();
    };
    std::string a = strip(run_suite({"MS-CONST", "L26-SPHERE"}, {"s2"}, cfg));
    std::string b = strip(run_suite({"MS-CONST", "L26-SPHERE"}, {"s2"}, cfg));
    CHECK(a == b);
}

TEST_CASE("csv report has the pinned header and one row per check") {
    VerifyConfig cfg;
    SuiteResult s = run_suite({"MS-CONST"}, {"s2"}, cfg);
    std::string csv = report_csv(s);
    CHECK(csv.rfind("id,geometry,complex,pass,error,tolerance,uncertainty,budget_used,wall_ms\n",
                    0) == 0);
    CHECK(csv.find("MS-CONST,s2,derham,pass,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
}
