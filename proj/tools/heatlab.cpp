// Command-line front end: spectra, traces, fitted coefficients, exact
// predictions, and the verification suite.

#include <CLI11.hpp>

#include <heatlab/verify.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace heatlab;

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << content;
}

struct SpectrumArgs {
    std::string geometry, complex_kind{"derham"}, degrees, out;
    double cutoff{0};
    double t_min{0.1};
    std::string eps_tail{"1e-25"};
};

int run_spectrum(const SpectrumArgs& a) {
    GeometrySpec spec = parse_geometry_file(a.geometry);
    ComplexKind kind = parse_kind(a.complex_kind);
    GradedSpectrum sp = (a.cutoff > 0)
                            ? build_spectrum_at_cutoff(spec, kind, Real(a.cutoff))
                            : build_spectrum(spec, kind, Real(a.t_min), Real(a.eps_tail));
    std::vector<int> degrees;
    if (a.degrees.empty()) {
        for (int g = 0; g <= sp.top; ++g) degrees.push_back(g);
    } else {
        for (const std::string& d : split_commas(a.degrees)) {
            int g = std::stoi(d);
            if (g < 0 || g > sp.top)
                throw Error("degree " + d + " out of range 0.." + std::to_string(sp.top));
            degrees.push_back(g);
        }
    }
    std::string csv = "grading,eigenvalue,multiplicity\n";
    for (int g : degrees) {
        for (const SpectralLine& l : sp.lines[g]) {
            csv += std::to_string(g) + "," + to_full_string(l.lambda) + "," +
                   std::to_string(l.mult) + "\n";
        }
    }
    write_file(a.out, csv);
    std::cout << "wrote " << a.out << " (" << sp.total_lines() << " lines, cutoff "
              << to_display_string(sp.cutoff, 8) << ")\n";
    return 0;
}

struct TraceArgs {
    std::string geometry, complex_kind{"derham"}, aggregate{"super"}, ladder{"0.5:0.7:14"}, out;
    std::string eps_tail{"1e-25"};
};

int run_trace(const TraceArgs& a) {
    GeometrySpec spec = parse_geometry_file(a.geometry);
    ComplexKind kind = parse_kind(a.complex_kind);
    Aggregate agg = parse_aggregate(a.aggregate);
    Ladder ladder = parse_ladder(a.ladder);
    Real eps(a.eps_tail);
    FactoredTrace ft(block_spectra(spec, kind, ladder.t_min(), eps), eps);
    std::string csv = "t,value,error_bound\n";
    for (const Real& t : ladder.points()) {
        AggValue v = ft.evaluate(t, agg);
        csv += to_full_string(t) + "," + to_full_string(v.value) + "," +
               to_display_string(v.bound, 12) + "\n";
    }
    write_file(a.out, csv);
    std::cout << "wrote " << a.out << " (" << ladder.count << " ladder points, aggregate "
              << agg.name() << ")\n";
    return 0;
}

struct CoeffsArgs {
    std::string geometry, complex_kind{"derham"}, aggregate{"super"}, orders{"0,2,4"};
    std::string ladder{"0.03:0.7:14"}, out;
    std::string eps_tail{"1e-25"};
};

int run_coeffs(const CoeffsArgs& a) {
    GeometrySpec spec = parse_geometry_file(a.geometry);
    ComplexKind kind = parse_kind(a.complex_kind);
    Aggregate agg = parse_aggregate(a.aggregate);
    Ladder ladder = parse_ladder(a.ladder);
    Real eps(a.eps_tail);
    std::vector<int> orders;
    int n_max = 0;
    for (const std::string& s : split_commas(a.orders)) {
        int n = std::stoi(s);
        if (n < 0 || n % 2 != 0) throw Error("orders must be even and nonnegative, got " + s);
        orders.push_back(n);
        n_max = std::max(n_max, n);
    }
    if (orders.empty()) throw Error("no orders requested");
    FactoredTrace ft(block_spectra(spec, kind, ladder.t_min(), eps), eps);
    std::vector<std::pair<Real, Real>> pts;
    for (const Real& t : ladder.points()) pts.emplace_back(t, ft.evaluate(t, agg).value);
    FitResult fit = fit_expansion(pts, spec.real_dimension(), n_max);
    Json j;
    j["m"] = spec.real_dimension();
    Json coeffs, unc;
    for (int n : orders) {
        coeffs[std::to_string(n)] = to_full_string(fit.coeff.at(n));
        unc[std::to_string(n)] = to_display_string(fit.uncertainty.at(n), 12);
    }
    j["coefficients"] = coeffs;
    j["uncertainty"] = unc;
    j["ladder"] = Json{{"t0", to_display_string(ladder.t0, 20)},
                       {"ratio", to_display_string(ladder.ratio, 20)},
                       {"count", ladder.count}};
    write_file(a.out, j.dump(2) + "\n");
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

struct PredictArgs {
    std::string geometry, identity{"euler"}, complex_kind{"dolbeault"}, out;
};

int run_predict(const PredictArgs& a) {
    GeometrySpec spec = parse_geometry_file(a.geometry);
    Json j;
    j["identity"] = a.identity;
    j["geometry"] = describe(spec);
    if (a.identity == "euler") {
        long chi = euler_char(spec);
        j["exact"] = std::to_string(chi);
        j["decimal"] = std::to_string(chi);
    } else if (a.identity == "index") {
        long idx = rr_index(spec);
        j["exact"] = std::to_string(idx);
        j["decimal"] = std::to_string(idx);
    } else if (a.identity == "derived-top") {
        Prediction p = predicted_derived_top(spec, parse_kind(a.complex_kind) == ComplexKind::Dolbeault);
        j["exact"] = p.value.to_string();
        j["decimal"] = to_display_string(p.value.eval(), 30);
        j["basis"] = p.basis;
    } else if (a.identity == "subleading") {
        Prediction p = predicted_subleading(spec);
        j["exact"] = p.value.to_string();
        j["decimal"] = to_display_string(p.value.eval(), 30);
        j["basis"] = p.basis;
    } else {
        throw Error("unknown identity '" + a.identity +
                    "' (expected euler, index, derived-top, or subleading)");
    }
    std::string text = j.dump(2) + "\n";
    if (a.out.empty()) {
        std::cout << text;
    } else {
        write_file(a.out, text);
        std::cout << "wrote " << a.out << "\n";
    }
    return 0;
}

struct VerifyArgs {
    std::string suite{"all"}, geometries, config, out, csv;
};

int run_verify(const VerifyArgs& a) {
    VerifyConfig cfg;
    if (!a.config.empty()) cfg = parse_config_file(a.config);
    std::vector<std::string> ids = split_commas(a.suite);
    std::vector<std::string> geoms = split_commas(a.geometries);
    SuiteResult suite = run_suite(ids, geoms, cfg);
    for (const CheckResult& c : suite.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << " @ " << c.geometry_name
                  << "  error " << to_display_string(c.error, 6) << " (tol "
                  << to_display_string(c.tolerance, 6) << ")";
        if (!c.note.empty()) std::cout << "  [" << c.note << "]";
        std::cout << "\n";
    }
    long passed = 0;
    for (const CheckResult& c : suite.checks) passed += c.pass ? 1 : 0;
    std::cout << passed << "/" << suite.checks.size() << " checks passed\n";
    if (!a.out.empty()) {
        write_file(a.out, report_json(suite, cfg).dump(2) + "\n");
        std::cout << "wrote " << a.out << "\n";
    }
    if (!a.csv.empty()) {
        write_file(a.csv, report_csv(suite));
        std::cout << "wrote " << a.csv << "\n";
    }
    return suite.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heatlab: certified heat-trace identities on model geometries"};
    app.require_subcommand(1);

    SpectrumArgs sa;
    auto* sc_spectrum = app.add_subcommand("spectrum", "dump a graded Laplacian spectrum to CSV");
    sc_spectrum->add_option("--geometry", sa.geometry, "geometry JSON file")->required();
    sc_spectrum->add_option("--complex", sa.complex_kind, "derham or dolbeault");
    sc_spectrum->add_option("--degree", sa.degrees, "comma list of gradings (default: all)");
    sc_spectrum->add_option("--cutoff", sa.cutoff, "explicit eigenvalue cutoff");
    sc_spectrum->add_option("--t-min", sa.t_min, "smallest t the tail must certify (default 0.1)");
    sc_spectrum->add_option("--eps-tail", sa.eps_tail, "tail budget used to solve the cutoff");
    sc_spectrum->add_option("--out", sa.out, "output CSV path")->required();

    TraceArgs ta;
    auto* sc_trace = app.add_subcommand("trace", "evaluate a trace aggregate on a t-ladder");
    sc_trace->add_option("--geometry", ta.geometry, "geometry JSON file")->required();
    sc_trace->add_option("--complex", ta.complex_kind, "derham or dolbeault");
    sc_trace->add_option("--aggregate", ta.aggregate, "super, derived, or s:VALUE");
    sc_trace->add_option("--t-ladder", ta.ladder, "T0:RATIO:COUNT (default 0.5:0.7:14)");
    sc_trace->add_option("--eps-tail", ta.eps_tail, "per-grading tail budget");
    sc_trace->add_option("--out", ta.out, "output CSV path")->required();

    CoeffsArgs ca;
    auto* sc_coeffs = app.add_subcommand("coeffs", "fit expansion coefficients from a trace aggregate");
    sc_coeffs->add_option("--geometry", ca.geometry, "geometry JSON file")->required();
    sc_coeffs->add_option("--complex", ca.complex_kind, "derham or dolbeault");
    sc_coeffs->add_option("--aggregate", ca.aggregate, "super, derived, or s:VALUE");
    sc_coeffs->add_option("--orders", ca.orders, "comma list of even orders (default 0,2,4)");
    sc_coeffs->add_option("--t-ladder", ca.ladder, "T0:RATIO:COUNT (default 0.03:0.7:14)");
    sc_coeffs->add_option("--eps-tail", ca.eps_tail, "per-grading tail budget");
    sc_coeffs->add_option("--out", ca.out, "output JSON path")->required();

    PredictArgs pa;
    auto* sc_predict = app.add_subcommand("predict", "exact characteristic-number predictions");
    sc_predict->add_option("--geometry", pa.geometry, "geometry JSON file")->required();
    sc_predict->add_option("--identity", pa.identity, "euler, index, derived-top, or subleading");
    sc_predict->add_option("--complex", pa.complex_kind, "complex for derived-top (default dolbeault)");
    sc_predict->add_option("--out", pa.out, "output JSON path (default: stdout)");

    VerifyArgs va;
    auto* sc_verify = app.add_subcommand("verify", "run the identity check suite");
    sc_verify->add_option("--suite", va.suite, "all, or comma list of check ids");
    sc_verify->add_option("--geometry", va.geometries, "restrict to comma list of battery names");
    sc_verify->add_option("--config", va.config, "JSON config (precision, ladders, tolerances)");
    sc_verify->add_option("--out", va.out, "JSON report path");
    sc_verify->add_option("--csv", va.csv, "CSV report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_spectrum->parsed()) return run_spectrum(sa);
        if (sc_trace->parsed()) return run_trace(ta);
        if (sc_coeffs->parsed()) return run_coeffs(ca);
        if (sc_predict->parsed()) return run_predict(pa);
        if (sc_verify->parsed()) return run_verify(va);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
