#pragma once
// Check catalogue and suite runner: every identity in the battery is run
// end to end (spectra, certified traces, coefficient fits) and compared
// against the exact characteristic-number predictions, with machine-readable
// reports.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <heatlab/asymptotics.hpp>
#include <heatlab/charnum.hpp>
#include <heatlab/geometry.hpp>
#include <heatlab/heat.hpp>
#include <heatlab/spectra.hpp>

namespace heatlab {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct VerifyConfig {
    int precision_digits{50};
    Ladder trace_ladder{};                               // exact-in-t identities
    Ladder fit_ladder{Real(3) / 100, Real(7) / 10, 14};  // coefficient fits
    Real eps_tail{Real("1e-25")};   // per-grading truncation budget
    Real tol_exact{Real("1e-20")};  // exact-in-t identities, absolute
    Real tol_fitted{Real("1e-6")};  // fitted coefficients vs exact predictions
    Real tol_deform{Real("1e-8")};  // deformed vs undeformed agreement

    void validate() const {
        if (precision_digits < 10) throw Error("config: precision_digits must be at least 10");
        if (precision_digits > real_digits10)
            throw Error("config: precision_digits exceeds the compiled precision (" +
                        std::to_string(real_digits10) + " digits)");
        trace_ladder.points();
        fit_ladder.points();
        if (!(eps_tail > 0) || !(tol_exact > 0) || !(tol_fitted > 0) || !(tol_deform > 0))
            throw Error("config: eps_tail and tolerances must be positive");
    }
};

namespace detail {
inline Real config_real(const Json& j, const char* field) {
    if (j.is_string()) {
        try {
            return Real(j.get<std::string>());
        } catch (const std::exception&) {
            throw Error(std::string("config: cannot parse '") + field + "'");
        }
    }
    if (j.is_number()) return Real(j.get<double>());
    throw Error(std::string("config: field '") + field + "' must be a number or numeric string");
}

inline Ladder config_ladder(const Json& j, const char* field) {
    if (j.is_string()) return parse_ladder(j.get<std::string>());
    if (!j.is_object())
        throw Error(std::string("config: '") + field + "' must be a T0:RATIO:COUNT string or an object");
    Ladder l;
    if (j.contains("t0")) l.t0 = config_real(j["t0"], field);
    if (j.contains("ratio")) l.ratio = config_real(j["ratio"], field);
    if (j.contains("count")) {
        if (!j["count"].is_number_integer()) throw Error(std::string("config: '") + field + ".count' must be an integer");
        l.count = j["count"].get<int>();
    }
    l.points();
    return l;
}

inline Json ladder_json(const Ladder& l) {
    Json j;
    j["t0"] = to_display_string(l.t0, 20);
    j["ratio"] = to_display_string(l.ratio, 20);
    j["count"] = l.count;
    return j;
}
}  // namespace detail

inline Json config_to_json(const VerifyConfig& c) {
    Json j;
    j["precision_digits"] = c.precision_digits;
    j["trace_ladder"] = detail::ladder_json(c.trace_ladder);
    j["fit_ladder"] = detail::ladder_json(c.fit_ladder);
    j["eps_tail"] = to_display_string(c.eps_tail, 20);
    j["tol_exact"] = to_display_string(c.tol_exact, 20);
    j["tol_fitted"] = to_display_string(c.tol_fitted, 20);
    j["tol_deform"] = to_display_string(c.tol_deform, 20);
    return j;
}

inline VerifyConfig parse_config_json(const Json& j) {
    if (!j.is_object()) throw Error("config: expected a JSON object");
    VerifyConfig c;
    for (const auto& [key, val] : j.items()) {
        if (key == "precision_digits") {
            if (!val.is_number_integer()) throw Error("config: precision_digits must be an integer");
            c.precision_digits = val.get<int>();
        } else if (key == "trace_ladder") {
            c.trace_ladder = detail::config_ladder(val, "trace_ladder");
        } else if (key == "fit_ladder") {
            c.fit_ladder = detail::config_ladder(val, "fit_ladder");
        } else if (key == "eps_tail") {
            c.eps_tail = detail::config_real(val, "eps_tail");
        } else if (key == "tol_exact") {
            c.tol_exact = detail::config_real(val, "tol_exact");
        } else if (key == "tol_fitted") {
            c.tol_fitted = detail::config_real(val, "tol_fitted");
        } else if (key == "tol_deform") {
            c.tol_deform = detail::config_real(val, "tol_deform");
        } else {
            throw Error("config: unknown field '" + key + "'");
        }
    }
    c.validate();
    return c;
}

inline VerifyConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("config: cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw Error(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct CheckRow {
    std::string label;
    Real predicted{0};
    Real computed{0};
    Real error{0};
    Real noise{0};  // certified truncation bound, or fit uncertainty
    Real tol{0};
};

struct CheckResult {
    std::string id;
    std::string geometry_name;
    std::string geometry;
    std::string complex_kind;
    std::string description;
    std::string predicted_exact;  // closed form of the headline prediction
    Real predicted{0};
    Real computed{0};
    Real error{0};        // worst row
    Real uncertainty{0};  // worst row noise
    Real tolerance{0};
    Real budget_used{0};  // largest certified truncation bound consumed
    bool pass{true};
    double wall_ms{0};
    std::string note;  // diagnostic when a stage refuses
    std::vector<CheckRow> rows;
};

// Requested check is not defined for the given geometry; unlike a failed
// identity this is a caller error and propagates as an exception.
struct PairingError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Default battery and catalogue
// ---------------------------------------------------------------------------

struct BatteryEntry {
    std::string name;
    GeometrySpec spec;
};

inline const std::vector<BatteryEntry>& default_battery() {
    static const std::vector<BatteryEntry> battery = [] {
        std::vector<BatteryEntry> v;
        auto add = [&v](const std::string& name, std::vector<Block> blocks) {
            GeometrySpec s;
            s.blocks = std::move(blocks);
            v.push_back({name, std::move(s)});
        };
        CircleBlock s1;
        CircleBlock s1a05;
        s1a05.witten_a = Real(1) / 2;
        SphereBlock s2;
        TorusBlock t0, t1, t2, t3;
        t1.bundle_degree = 1;
        t2.bundle_degree = 2;
        t3.bundle_degree = 3;
        TorusBlock t1a2 = t1;
        t1a2.area = 2;
        TorusBlock t0c;
        t0c.novikov_re = Real(3) / 10;
        t0c.novikov_im = Real(1) / 5;
        TorusBlock t0w05;
        t0w05.novikov_re = Real(1) / 2;
        add("s1", {s1});
        add("s2", {s2});
        add("t0", {t0});
        add("t1", {t1});
        add("t2", {t2});
        add("t3", {t3});
        add("s1xs1", {s1, s1});
        add("s2xs2", {s2, s2});
        add("s2xt1", {s2, t1});
        add("s2xt2", {s2, t2});
        add("t1xt1", {t1, t1});
        add("t2a1xt1a2", {t2, t1a2});
        add("t2xt3", {t2, t3});
        add("s2xs1", {s2, s1});
        add("s1a05", {s1a05});
        add("t0c", {t0c});
        add("t0w05", {t0w05});
        return v;
    }();
    return battery;
}

inline const GeometrySpec& battery_geometry(const std::string& name) {
    for (const auto& e : default_battery())
        if (e.name == name) return e.spec;
    throw Error("verify: unknown battery geometry '" + name + "'");
}

struct CheckDef {
    std::string id;
    std::string description;
    std::vector<std::string> battery;  // default geometries for the check
};

inline const std::vector<CheckDef>& check_catalogue() {
    static const std::vector<CheckDef> defs = {
        {"MS-CONST", "de Rham supertrace is constant in t, equal to the Euler characteristic",
         {"s1", "s2", "t0", "t1", "t2", "t3", "s1xs1", "s2xs2", "s2xt1", "s2xt2", "t1xt1",
          "t2a1xt1a2", "t2xt3", "s2xs1", "s1a05", "t0w05"}},
        {"RR-CONST", "Dolbeault supertrace is constant in t, equal to the Riemann-Roch index",
         {"s2", "t0", "t1", "t2", "t3", "s2xs2", "s2xt1", "s2xt2", "t1xt1", "t2a1xt1a2",
          "t2xt3", "t0c"}},
        {"INDEX-VANISH", "fitted supertrace coefficients vanish for n != m and give the index at n = m",
         {"s2", "t1", "t3", "s2xt1", "t1xt1", "t0c", "s1xs1", "s2xs1"}},
        {"DERHAM-DERIVED-VANISH", "fitted de Rham derived coefficients vanish below order m-1",
         {"s2", "t1", "s1xs1", "s2xs2", "s2xt1", "t1xt1", "s2xs1"}},
        {"DERHAM-DERIVED-TOP",
         "top fitted de Rham derived coefficient equals (m/2) times the Euler characteristic",
         {"s2", "t1", "s1xs1", "s2xs2", "s2xt1", "t0w05"}},
        {"DOL-DERIVED-TOP",
         "fitted Dolbeault derived coefficients match the characteristic-number predictions",
         {"s2", "t0", "t1", "t2", "t3", "s2xs2", "s2xt1", "s2xt2", "t1xt1", "t2a1xt1a2", "t2xt3"}},
        {"DOL-SUBLEADING",
         "order m-2 Dolbeault derived coefficient equals the volume-weighted recursion value",
         {"s2", "t1", "s2xt1", "t1xt1", "t2a1xt1a2"}},
        {"PRODUCT-EXACT",
         "direct product spectrum and block factorization give the same derived trace",
         {"t1xt1", "t2a1xt1a2", "s2xt1", "s2xs2", "s2xs1"}},
        {"RESTRICT-CIRCLE",
         "derived trace of N x S1 equals minus the circle trace times the supertrace of N",
         {"s2xs1"}},
        {"WITTEN-SHIFT", "deformed spectra collapse onto undeformed ones under exp(+t a^2)",
         {"s1a05", "t0w05"}},
        {"NOVIKOV-INV",
         "fitted coefficients are unchanged by the deformation while the spectrum itself moves",
         {"t0c"}},
        {"L26-SPHERE",
         "order-2 Dolbeault coefficients on the round sphere: 1/3 and -2/3 per grading, 1 for the supertrace",
         {"s2"}},
    };
    return defs;
}

inline const CheckDef& check_definition(const std::string& id) {
    for (const auto& d : check_catalogue())
        if (d.id == id) return d;
    throw Error("verify: unknown check id '" + id + "'");
}

inline std::vector<std::string> all_check_ids() {
    std::vector<std::string> ids;
    for (const auto& d : check_catalogue()) ids.push_back(d.id);
    return ids;
}

// ---------------------------------------------------------------------------
// Check engines
// ---------------------------------------------------------------------------

namespace detail {

// Fold one comparison row into the result: worst error and noise become the
// headline, and any row outside its tolerance fails the check.
inline void fold_row(CheckResult& r, CheckRow row) {
    if (row.error > r.error) r.error = row.error;
    if (row.noise > r.uncertainty) r.uncertainty = row.noise;
    if (!(row.error <= row.tol && row.noise <= row.tol / 10)) r.pass = false;
    r.rows.push_back(std::move(row));
}

inline CheckResult result_shell(const std::string& id, const std::string& name,
                                const GeometrySpec& spec, ComplexKind kind,
                                const std::string& description) {
    CheckResult r;
    r.id = id;
    r.geometry_name = name;
    r.geometry = describe(spec);
    r.complex_kind = kind_name(kind);
    r.description = description;
    return r;
}

// Supertrace or derived trace equals an exact constant at every ladder point.
inline CheckResult exact_constant_check(const std::string& id, const std::string& name,
                                        const GeometrySpec& spec, ComplexKind kind,
                                        const Aggregate& agg, const PiHalfPoly& predicted,
                                        const VerifyConfig& cfg, const std::string& description) {
    CheckResult r = result_shell(id, name, spec, kind, description);
    r.predicted_exact = predicted.to_string();
    r.predicted = predicted.eval();
    r.tolerance = cfg.tol_exact;
    FactoredTrace ft(block_spectra(spec, kind, cfg.trace_ladder.t_min(), cfg.eps_tail),
                     cfg.eps_tail);
    for (const Real& t : cfg.trace_ladder.points()) {
        AggValue v = ft.evaluate(t, agg);
        CheckRow row;
        row.label = "t=" + to_display_string(t, 12);
        row.predicted = r.predicted;
        row.computed = v.value;
        row.error = abs(v.value - r.predicted);
        row.noise = v.bound;
        row.tol = cfg.tol_exact;
        if (row.error >= r.error) r.computed = row.computed;
        if (row.noise > r.budget_used) r.budget_used = row.noise;
        fold_row(r, std::move(row));
    }
    return r;
}

// Fitted expansion coefficients equal exact predictions, order by order.
struct FitTargets {
    std::map<int, PiHalfPoly> predicted;  // order n -> exact value
    int n_max{0};
};

inline CheckResult fitted_check(const std::string& id, const std::string& name,
                                const GeometrySpec& spec, ComplexKind kind, const Aggregate& agg,
                                const FitTargets& targets, const Real& tol,
                                const VerifyConfig& cfg, const std::string& description) {
    if (targets.predicted.empty()) throw Error("fitted_check: no target orders");
    CheckResult r = result_shell(id, name, spec, kind, description);
    r.tolerance = tol;
    FactoredTrace ft(block_spectra(spec, kind, cfg.fit_ladder.t_min(), cfg.eps_tail),
                     cfg.eps_tail);
    std::vector<std::pair<Real, Real>> pts;
    for (const Real& t : cfg.fit_ladder.points()) {
        AggValue v = ft.evaluate(t, agg);
        pts.emplace_back(t, v.value);
        if (v.bound > r.budget_used) r.budget_used = v.bound;
    }
    FitResult fit = fit_expansion(pts, spec.real_dimension(), targets.n_max);
    const int n_top = targets.predicted.rbegin()->first;
    for (const auto& [n, poly] : targets.predicted) {
        CheckRow row;
        row.label = "n=" + std::to_string(n);
        row.predicted = poly.eval();
        row.computed = fit.coeff.count(n) ? fit.coeff.at(n) : Real(0);
        row.noise = fit.uncertainty.count(n) ? fit.uncertainty.at(n) : Real(0);
        row.error = abs(row.computed - row.predicted);
        row.tol = tol;
        if (n == n_top) {
            r.predicted_exact = poly.to_string();
            r.predicted = row.predicted;
            r.computed = row.computed;
        }
        fold_row(r, std::move(row));
    }
    return r;
}

// Worker for each catalogue id; throws PairingError on an illegal pairing,
// plain Error from any stage becomes a recorded failure.
inline CheckResult build_check(const std::string& id, const std::string& name,
                               const GeometrySpec& spec, const VerifyConfig& cfg) {
    const int m = spec.real_dimension();
    const bool complex_ok = spec.complex_admissible();
    Aggregate sup;
    Aggregate der;
    der.mode = Aggregate::Mode::Derived;
    const std::string& description = check_definition(id).description;

    if (id == "MS-CONST") {
        return exact_constant_check(id, name, spec, ComplexKind::DeRham, sup,
                                    PiHalfPoly(Rational(euler_char(spec))), cfg, description);
    }

    if (id == "RR-CONST") {
        if (!complex_ok) throw PairingError("RR-CONST: geometry has no complex structure");
        return exact_constant_check(id, name, spec, ComplexKind::Dolbeault, sup,
                                    PiHalfPoly(Rational(rr_index(spec))), cfg, description);
    }

    if (id == "INDEX-VANISH") {
        ComplexKind kind = complex_ok ? ComplexKind::Dolbeault : ComplexKind::DeRham;
        Rational index = complex_ok ? Rational(rr_index(spec)) : Rational(euler_char(spec));
        FitTargets tg;
        tg.n_max = (m % 2 == 0) ? m : m - 1;
        for (int n = 0; n <= tg.n_max; n += 2)
            tg.predicted[n] = (n == m) ? PiHalfPoly(index) : PiHalfPoly();
        return fitted_check(id, name, spec, kind, sup, tg, cfg.tol_fitted, cfg, description);
    }

    if (id == "DERHAM-DERIVED-VANISH") {
        FitTargets tg;
        tg.n_max = (m % 2 == 0) ? m : m - 1;
        for (int n = 0; n < m - 1; n += 2) tg.predicted[n] = PiHalfPoly();
        if (tg.predicted.empty())
            throw PairingError("DERHAM-DERIVED-VANISH: no orders below m-1 in dimension " +
                               std::to_string(m));
        return fitted_check(id, name, spec, ComplexKind::DeRham, der, tg, cfg.tol_fitted, cfg,
                            description);
    }

    if (id == "DERHAM-DERIVED-TOP") {
        if (m % 2 != 0)
            throw PairingError("DERHAM-DERIVED-TOP: top coefficient needs even dimension");
        Prediction top = predicted_derived_top(spec, false);
        FitTargets tg;
        tg.n_max = m;
        tg.predicted[m] = top.value;
        return fitted_check(id, name, spec, ComplexKind::DeRham, der, tg, cfg.tol_fitted, cfg,
                            description + " [" + top.basis + "]");
    }

    if (id == "DOL-DERIVED-TOP") {
        if (!complex_ok) throw PairingError("DOL-DERIVED-TOP: geometry has no complex structure");
        Prediction top = predicted_derived_top(spec, true);
        VerifyConfig cfg_local = cfg;
        FitTargets tg;
        CheckRow oracle_row;
        bool have_oracle_row = false;
        if (spec.blocks.size() == 1 && std::holds_alternative<TorusBlock>(spec.blocks[0])) {
            // single flat torus: the whole window comes from the exact
            // geometric-series oracle, including the first Bernoulli term
            const auto& tb = std::get<TorusBlock>(spec.blocks[0]);
            auto oracle = bernoulli_oracle(tb.bundle_degree, to_rational(tb.area), 4);
            tg.n_max = 4;
            // the tower is a series in x = 4|d|/A whose terms diverge once
            // x > 2 pi; cap x * t0 so orders beyond the guarded basis stay
            // below the fit's noise floor
            Real x = Real(4 * (tb.bundle_degree < 0 ? -tb.bundle_degree : tb.bundle_degree)) /
                     tb.area;
            const Real cap = Real(6) / 25;
            if (x * cfg_local.fit_ladder.t0 > cap) cfg_local.fit_ladder.t0 = cap / x;
            tg.predicted[0] = oracle.at(0);
            tg.predicted[2] = oracle.at(2);
            tg.predicted[4] = oracle.at(4);
            oracle_row.label = "oracle A2 == charnum top (exact)";
            oracle_row.predicted = top.value.eval();
            oracle_row.computed = oracle.at(2).eval();
            oracle_row.error = (oracle.at(2) == top.value) ? Real(0) : Real(1);
            oracle_row.noise = 0;
            oracle_row.tol = cfg.tol_fitted;
            have_oracle_row = true;
        } else if (spec.blocks.size() == 1) {
            tg.n_max = 2;
            tg.predicted[0] = predicted_subleading(spec).value;
            tg.predicted[2] = top.value;
        } else {
            tg.n_max = m;
            tg.predicted[0] = PiHalfPoly();
            tg.predicted[m - 2] = predicted_subleading(spec).value;
            tg.predicted[m] = top.value;
        }
        CheckResult r = fitted_check(id, name, spec, ComplexKind::Dolbeault, der, tg,
                                     cfg.tol_fitted, cfg_local, description + " [" + top.basis + "]");
        if (have_oracle_row) fold_row(r, std::move(oracle_row));
        return r;
    }

    if (id == "DOL-SUBLEADING") {
        if (!complex_ok) throw PairingError("DOL-SUBLEADING: geometry has no complex structure");
        Prediction sub = predicted_subleading(spec);
        FitTargets tg;
        tg.n_max = m;
        tg.predicted[m - 2] = sub.value;
        return fitted_check(id, name, spec, ComplexKind::Dolbeault, der, tg, cfg.tol_fitted, cfg,
                            description + " [" + sub.basis + "]");
    }

    if (id == "PRODUCT-EXACT") {
        if (spec.blocks.size() < 2) throw PairingError("PRODUCT-EXACT: needs a product geometry");
        ComplexKind kind = complex_ok ? ComplexKind::Dolbeault : ComplexKind::DeRham;
        CheckResult r = result_shell(id, name, spec, kind, check_definition(id).description);
        r.predicted_exact = "0";
        r.tolerance = cfg.tol_exact;
        FactoredTrace ft(block_spectra(spec, kind, cfg.trace_ladder.t_min(), cfg.eps_tail),
                         cfg.eps_tail);
        GradedSpectrum direct = build_spectrum(spec, kind, cfg.trace_ladder.t_min(), cfg.eps_tail);
        for (const IdentityRow& ir :
             product_derived_identity(direct, ft, cfg.trace_ladder, cfg.eps_tail)) {
            CheckRow row;
            row.label = "t=" + to_display_string(ir.t, 12);
            row.predicted = ir.rhs;  // factored
            row.computed = ir.lhs;   // direct
            row.error = ir.error;
            row.noise = ir.bound;
            row.tol = cfg.tol_exact;
            if (row.error >= r.error) r.computed = row.error;
            if (row.noise > r.budget_used) r.budget_used = row.noise;
            fold_row(r, std::move(row));
        }
        return r;
    }

    if (id == "RESTRICT-CIRCLE") {
        if (spec.blocks.size() < 2 || !std::holds_alternative<CircleBlock>(spec.blocks.back()))
            throw PairingError("RESTRICT-CIRCLE: needs N x S1 with a trailing circle block");
        if (std::get<CircleBlock>(spec.blocks.back()).witten_a != 0)
            throw PairingError("RESTRICT-CIRCLE: the circle factor must be undeformed");
        CheckResult r =
            result_shell(id, name, spec, ComplexKind::DeRham, check_definition(id).description);
        r.predicted_exact = "0";
        r.tolerance = cfg.tol_exact;
        auto blocks = block_spectra(spec, ComplexKind::DeRham, cfg.trace_ladder.t_min(), cfg.eps_tail);
        GradedSpectrum circle = blocks.back();
        std::vector<GradedSpectrum> nblocks(blocks.begin(), blocks.end() - 1);
        FactoredTrace full(std::move(blocks), cfg.eps_tail);
        FactoredTrace rest(std::move(nblocks), cfg.eps_tail);
        for (const Real& t : cfg.trace_ladder.points()) {
            AggValue lhs = full.evaluate(t, der);
            AggValue strn = rest.evaluate(t, sup);
            TraceSample cs = certified_trace(circle, t, cfg.eps_tail);
            Real rhs = -cs.values[0] * strn.value;
            CheckRow row;
            row.label = "t=" + to_display_string(t, 12);
            row.predicted = rhs;
            row.computed = lhs.value;
            row.error = abs(lhs.value - rhs);
            row.noise = lhs.bound + cs.bounds[0] * (abs(strn.value) + strn.bound) +
                        abs(cs.values[0]) * strn.bound;
            row.tol = cfg.tol_exact;
            if (row.error >= r.error) r.computed = row.error;
            if (row.noise > r.budget_used) r.budget_used = row.noise;
            fold_row(r, std::move(row));
        }
        return r;
    }

    if (id == "WITTEN-SHIFT") {
        if (spec.blocks.size() != 1)
            throw PairingError("WITTEN-SHIFT: runs on a single deformed block");
        GeometrySpec twin = spec;
        Real shift = 0;
        bool is_circle = false;
        if (auto* cb = std::get_if<CircleBlock>(&twin.blocks[0])) {
            if (cb->witten_a == 0) throw PairingError("WITTEN-SHIFT: circle is undeformed");
            shift = cb->witten_a * cb->witten_a;
            cb->witten_a = 0;
            is_circle = true;
        } else if (auto* tb = std::get_if<TorusBlock>(&twin.blocks[0])) {
            if (tb->novikov_re == 0 && tb->novikov_im == 0)
                throw PairingError("WITTEN-SHIFT: torus is undeformed");
            shift = tb->novikov_re * tb->novikov_re + tb->novikov_im * tb->novikov_im;
            tb->novikov_re = 0;
            tb->novikov_im = 0;
        } else {
            throw PairingError("WITTEN-SHIFT: the sphere has no closed deformation 1-form");
        }
        CheckResult r =
            result_shell(id, name, spec, ComplexKind::DeRham, check_definition(id).description);
        r.predicted_exact = "0";
        r.tolerance = cfg.tol_exact;
        auto def = block_spectra(spec, ComplexKind::DeRham, cfg.trace_ladder.t_min(), cfg.eps_tail);
        auto undef = block_spectra(twin, ComplexKind::DeRham, cfg.trace_ladder.t_min(), cfg.eps_tail);
        for (const Real& t : cfg.trace_ladder.points()) {
            TraceSample ds = certified_trace(def[0], t, cfg.eps_tail);
            TraceSample us = certified_trace(undef[0], t, cfg.eps_tail);
            Real f = exp(t * shift);
            CheckRow row;
            row.label = "t=" + to_display_string(t, 12);
            row.tol = cfg.tol_exact;
            for (size_t p = 0; p < ds.values.size(); ++p) {
                Real err = abs(ds.values[p] * f - us.values[p]);
                Real noise = ds.bounds[p] * f + us.bounds[p];
                if (err >= row.error) {
                    row.error = err;
                    row.predicted = us.values[p];
                    row.computed = ds.values[p] * f;
                }
                if (noise > row.noise) row.noise = noise;
            }
            if (row.error >= r.error) r.computed = row.error;
            if (row.noise > r.budget_used) r.budget_used = row.noise;
            fold_row(r, std::move(row));
        }
        if (is_circle) {
            // fitted coefficients of the deformed grading-0 trace against the
            // exact polynomial in a^2
            const auto& cb = std::get<CircleBlock>(spec.blocks[0]);
            PiHalfPoly L = (cb.circumference == 2 * pi())
                               ? PiHalfPoly::term(2, 2)
                               : PiHalfPoly(to_rational(cb.circumference));
            Rational a2 = to_rational(cb.witten_a) * to_rational(cb.witten_a);
            auto oracle = circle_oracle(L, a2, 4);
            auto fit_blocks =
                block_spectra(spec, ComplexKind::DeRham, cfg.fit_ladder.t_min(), cfg.eps_tail);
            std::vector<std::pair<Real, Real>> pts;
            for (const Real& t : cfg.fit_ladder.points()) {
                TraceSample s = certified_trace(fit_blocks[0], t, cfg.eps_tail);
                pts.emplace_back(t, s.values[0]);
                if (s.bounds[0] > r.budget_used) r.budget_used = s.bounds[0];
            }
            FitResult fit = fit_expansion(pts, 1, 4);
            for (int n = 0; n <= 4; n += 2) {
                CheckRow row;
                row.label = "Tr0 n=" + std::to_string(n);
                row.predicted = oracle.at(n).eval();
                row.computed = fit.coeff.at(n);
                row.error = abs(row.computed - row.predicted);
                row.noise = fit.uncertainty.at(n);
                row.tol = cfg.tol_deform;
                fold_row(r, std::move(row));
            }
            // headline error can now come from a fit row, so the headline
            // tolerance must be the looser of the two row gates
            r.tolerance = cfg.tol_deform;
        }
        return r;
    }

    if (id == "NOVIKOV-INV") {
        if (spec.blocks.size() != 1 || !std::holds_alternative<TorusBlock>(spec.blocks[0]))
            throw PairingError("NOVIKOV-INV: runs on a single deformed torus");
        const auto& tb = std::get<TorusBlock>(spec.blocks[0]);
        if (tb.novikov_re == 0 && tb.novikov_im == 0)
            throw PairingError("NOVIKOV-INV: torus is undeformed");
        if (tb.bundle_degree != 0)
            throw PairingError("NOVIKOV-INV: deformation with a nontrivial bundle is unsupported");
        GeometrySpec twin = spec;
        auto& twin_tb = std::get<TorusBlock>(twin.blocks[0]);
        twin_tb.novikov_re = 0;
        twin_tb.novikov_im = 0;
        CheckResult r =
            result_shell(id, name, spec, ComplexKind::Dolbeault, check_definition(id).description);
        r.predicted_exact = "0";
        r.tolerance = cfg.tol_deform;
        auto def = block_spectra(spec, ComplexKind::Dolbeault, cfg.fit_ladder.t_min(), cfg.eps_tail);
        auto undef =
            block_spectra(twin, ComplexKind::Dolbeault, cfg.fit_ladder.t_min(), cfg.eps_tail);
        const int top = def[0].top;
        std::vector<std::vector<std::pair<Real, Real>>> pts_def(top + 1), pts_undef(top + 1);
        for (const Real& t : cfg.fit_ladder.points()) {
            TraceSample ds = certified_trace(def[0], t, cfg.eps_tail);
            TraceSample us = certified_trace(undef[0], t, cfg.eps_tail);
            for (int q = 0; q <= top; ++q) {
                pts_def[q].emplace_back(t, ds.values[q]);
                pts_undef[q].emplace_back(t, us.values[q]);
                Real b = ds.bounds[q] > us.bounds[q] ? ds.bounds[q] : us.bounds[q];
                if (b > r.budget_used) r.budget_used = b;
            }
        }
        for (int q = 0; q <= top; ++q) {
            FitResult fd = fit_expansion(pts_def[q], m, m);
            FitResult fu = fit_expansion(pts_undef[q], m, m);
            for (int n = 0; n <= m; n += 2) {
                CheckRow row;
                row.label = "q=" + std::to_string(q) + " n=" + std::to_string(n);
                row.predicted = fu.coeff.at(n);
                row.computed = fd.coeff.at(n);
                row.error = abs(row.computed - row.predicted);
                row.noise = fd.uncertainty.at(n) + fu.uncertainty.at(n);
                row.tol = cfg.tol_deform;
                if (row.error >= r.error) r.computed = row.error;
                fold_row(r, std::move(row));
            }
        }
        // the agreement is not a spectral coincidence: the ground eigenvalue
        // itself moves by a visible amount
        const Real bar = Real(1) / 100;
        Real lam_def = def[0].lines[0].front().lambda;
        Real lam_undef = undef[0].lines[0].front().lambda;
        Real disp = abs(lam_def - lam_undef);
        CheckRow row;
        row.label = "ground eigenvalue displacement >= 0.01";
        row.predicted = lam_undef;
        row.computed = lam_def;
        row.error = disp >= bar ? Real(0) : bar - disp;
        row.noise = 0;
        row.tol = cfg.tol_deform;
        fold_row(r, std::move(row));
        return r;
    }

    if (id == "L26-SPHERE") {
        if (spec.blocks.size() != 1 || !std::holds_alternative<SphereBlock>(spec.blocks[0]))
            throw PairingError("L26-SPHERE: runs on a single round sphere");
        CheckResult r =
            result_shell(id, name, spec, ComplexKind::Dolbeault, check_definition(id).description);
        r.tolerance = cfg.tol_fitted;
        CharRecord rec = char_record(spec);
        PiHalfPoly quarter = PiHalfPoly::term(Rational(1, 4), -2);       // 1/(4 pi)
        PiHalfPoly a0 = rec.blocks[0].volume * quarter;                  // Vol/(4 pi) = r^2
        PiHalfPoly a2_q0 = rec.blocks[0].integral_tau * quarter * Rational(1, 6);
        PiHalfPoly index = Rational(rr_index(spec));
        PiHalfPoly a2_q1 = a2_q0 - index;
        auto blocks =
            block_spectra(spec, ComplexKind::Dolbeault, cfg.fit_ladder.t_min(), cfg.eps_tail);
        std::vector<std::pair<Real, Real>> pts_q0, pts_q1, pts_super;
        for (const Real& t : cfg.fit_ladder.points()) {
            TraceSample s = certified_trace(blocks[0], t, cfg.eps_tail);
            pts_q0.emplace_back(t, s.values[0]);
            pts_q1.emplace_back(t, s.values[1]);
            pts_super.emplace_back(t, s.values[0] - s.values[1]);
            Real b = s.bounds[0] + s.bounds[1];
            if (b > r.budget_used) r.budget_used = b;
        }
        struct Series {
            const char* tag;
            std::vector<std::pair<Real, Real>>* pts;
            std::map<int, PiHalfPoly> targets;
        };
        std::vector<Series> series = {
            {"q0", &pts_q0, {{0, a0}, {2, a2_q0}}},
            {"q1", &pts_q1, {{0, a0}, {2, a2_q1}}},
            {"super", &pts_super, {{0, PiHalfPoly()}, {2, index}}},
        };
        for (auto& s : series) {
            FitResult fit = fit_expansion(*s.pts, 2, 2);
            for (const auto& [n, poly] : s.targets) {
                CheckRow row;
                row.label = std::string(s.tag) + " n=" + std::to_string(n);
                row.predicted = poly.eval();
                row.computed = fit.coeff.at(n);
                row.error = abs(row.computed - row.predicted);
                row.noise = fit.uncertainty.at(n);
                row.tol = cfg.tol_fitted;
                if (std::string(s.tag) == "super" && n == 2) {
                    r.predicted_exact = poly.to_string();
                    r.predicted = row.predicted;
                    r.computed = row.computed;
                }
                fold_row(r, std::move(row));
            }
        }
        return r;
    }

    throw Error("verify: unknown check id '" + id + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Runner and reports
// ---------------------------------------------------------------------------

inline CheckResult run_check(const std::string& id, const std::string& geometry_name,
                             const GeometrySpec& spec, const VerifyConfig& cfg) {
    cfg.validate();
    check_definition(id);  // unknown id is an error, not a failed result
    auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = detail::build_check(id, geometry_name, spec, cfg);
    } catch (const PairingError&) {
        throw;
    } catch (const Error& e) {
        r = detail::result_shell(id, geometry_name, spec, ComplexKind::DeRham,
                                 check_definition(id).description);
        r.pass = false;
        r.note = e.what();
    }
    r.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline CheckResult run_check(const std::string& id, const GeometrySpec& spec,
                             const VerifyConfig& cfg) {
    return run_check(id, describe(spec), spec, cfg);
}

struct SuiteResult {
    std::vector<CheckResult> checks;
    bool all_pass{true};
};

// Runs the selected checks over their default geometries (optionally
// restricted to a named subset), in catalogue order.
inline SuiteResult run_suite(const std::vector<std::string>& ids,
                             const std::vector<std::string>& geometries,
                             const VerifyConfig& cfg) {
    cfg.validate();
    std::vector<std::string> selected = ids;
    if (selected.empty() || (selected.size() == 1 && selected[0] == "all"))
        selected = all_check_ids();
    for (const auto& id : selected) check_definition(id);
    for (const auto& g : geometries) battery_geometry(g);
    SuiteResult out;
    for (const CheckDef& def : check_catalogue()) {
        if (std::find(selected.begin(), selected.end(), def.id) == selected.end()) continue;
        for (const std::string& g : def.battery) {
            if (!geometries.empty() &&
                std::find(geometries.begin(), geometries.end(), g) == geometries.end())
                continue;
            out.checks.push_back(run_check(def.id, g, battery_geometry(g), cfg));
            out.all_pass = out.all_pass && out.checks.back().pass;
        }
    }
    return out;
}

inline SuiteResult run_suite(const std::vector<std::string>& ids, const VerifyConfig& cfg) {
    return run_suite(ids, {}, cfg);
}

inline Json report_json(const SuiteResult& suite, const VerifyConfig& cfg) {
    Json j;
    j["engine"] = "heatlab";
    j["config"] = config_to_json(cfg);
    Json checks = Json::array();
    long passed = 0;
    for (const CheckResult& c : suite.checks) {
        Json cj;
        cj["id"] = c.id;
        cj["geometry"] = c.geometry_name;
        cj["geometry_description"] = c.geometry;
        cj["complex"] = c.complex_kind;
        cj["description"] = c.description;
        cj["predicted"] = Json{{"exact", c.predicted_exact},
                               {"decimal", to_display_string(c.predicted, 30)}};
        cj["computed"] = to_display_string(c.computed, 30);
        cj["error"] = to_display_string(c.error, 12);
        cj["uncertainty"] = to_display_string(c.uncertainty, 12);
        cj["tolerance"] = to_display_string(c.tolerance, 12);
        cj["truncation_budget_used"] = to_display_string(c.budget_used, 12);
        cj["pass"] = c.pass;
        cj["wall_ms"] = c.wall_ms;
        if (!c.note.empty()) cj["note"] = c.note;
        Json rows = Json::array();
        for (const CheckRow& row : c.rows) {
            rows.push_back(Json{{"label", row.label},
                                {"predicted", to_display_string(row.predicted, 30)},
                                {"computed", to_display_string(row.computed, 30)},
                                {"error", to_display_string(row.error, 12)},
                                {"noise", to_display_string(row.noise, 12)},
                                {"tolerance", to_display_string(row.tol, 12)}});
        }
        cj["rows"] = rows;
        checks.push_back(std::move(cj));
        if (c.pass) ++passed;
    }
    j["checks"] = checks;
    j["summary"] = Json{{"total", suite.checks.size()},
                        {"passed", passed},
                        {"failed", suite.checks.size() - passed},
                        {"all_pass", suite.all_pass}};
    return j;
}

inline std::string report_csv(const SuiteResult& suite) {
    std::string out = "id,geometry,complex,pass,error,tolerance,uncertainty,budget_used,wall_ms\n";
    for (const CheckResult& c : suite.checks) {
        out += c.id + "," + c.geometry_name + "," + c.complex_kind + "," +
               (c.pass ? "pass" : "fail") + "," + to_display_string(c.error, 12) + "," +
               to_display_string(c.tolerance, 12) + "," + to_display_string(c.uncertainty, 12) +
               "," + to_display_string(c.budget_used, 12) + "," + std::to_string(c.wall_ms) + "\n";
    }
    return out;
}

}  // namespace heatlab
