#pragma once
// Model geometries: ordered products of circles, round 2-spheres, and flat
// complex tori, with their deformation and bundle data, plus the exact
// characteristic record each block contributes.

#include "heatlab/exact.hpp"
#include "heatlab/real.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace heatlab {

using Json = nlohmann::ordered_json;

struct CircleBlock {
    Real circumference{2 * pi()};
    Real witten_a{0};  // closed 1-form deformation a * dtheta/|dtheta|
};

struct SphereBlock {
    Real radius{1};
};

struct TorusBlock {
    Real area{1};
    Real modulus_re{0};
    Real modulus_im{1};
    long bundle_degree{0};
    Real novikov_re{0};  // c in the unit (1,0)-coframe; de Rham reads Re(c dz)
    Real novikov_im{0};
};

using Block = std::variant<CircleBlock, SphereBlock, TorusBlock>;

inline int block_dimension(const Block& b) {
    return std::holds_alternative<CircleBlock>(b) ? 1 : 2;
}

inline std::string block_kind(const Block& b) {
    if (std::holds_alternative<CircleBlock>(b)) return "circle";
    if (std::holds_alternative<SphereBlock>(b)) return "sphere";
    return "complex_torus";
}

struct GeometrySpec {
    std::vector<Block> blocks;

    int real_dimension() const {
        int m = 0;
        for (const auto& b : blocks) m += block_dimension(b);
        return m;
    }
    // The Dolbeault side is defined when every block carries a complex
    // structure, i.e. no circle factors.
    bool complex_admissible() const {
        for (const auto& b : blocks)
            if (std::holds_alternative<CircleBlock>(b)) return false;
        return true;
    }
    int complex_dimension() const {
        if (!complex_admissible()) throw Error("complex_dimension: geometry has a circle factor");
        return real_dimension() / 2;
    }
    bool deformed() const {
        for (const auto& b : blocks) {
            if (const auto* c = std::get_if<CircleBlock>(&b); c && c->witten_a != 0) return true;
            if (const auto* t = std::get_if<TorusBlock>(&b);
                t && (t->novikov_re != 0 || t->novikov_im != 0))
                return true;
        }
        return false;
    }
};

namespace detail {
inline Real json_real(const Json& j, const char* field) {
    if (!j.is_number()) throw Error(std::string("geometry: field '") + field + "' must be a number");
    return Real(j.get<double>());
}
inline Real json_component(const Json& j, const char* field, int idx) {
    if (!j.is_array() || j.size() != 2 || !j[idx].is_number())
        throw Error(std::string("geometry: field '") + field + "' must be [re, im]");
    return Real(j[idx].get<double>());
}
}  // namespace detail

inline GeometrySpec parse_geometry_json(const Json& j) {
    if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array())
        throw Error("geometry: expected an object with a 'blocks' array");
    GeometrySpec spec;
    for (const auto& bj : j["blocks"]) {
        if (!bj.is_object() || !bj.contains("kind") || !bj["kind"].is_string())
            throw Error("geometry: each block needs a string 'kind'");
        const std::string kind = bj["kind"].get<std::string>();
        if (kind == "circle") {
            CircleBlock c;
            if (!bj.contains("circumference")) throw Error("geometry: circle needs 'circumference'");
            c.circumference = detail::json_real(bj["circumference"], "circumference");
            if (bj.contains("witten_a")) c.witten_a = detail::json_real(bj["witten_a"], "witten_a");
            if (!(c.circumference > 0)) throw Error("geometry: circumference must be positive");
            if (!boost::math::isfinite(c.witten_a)) throw Error("geometry: witten_a must be finite");
            spec.blocks.emplace_back(c);
        } else if (kind == "sphere") {
            SphereBlock s;
            if (!bj.contains("radius")) throw Error("geometry: sphere needs 'radius'");
            s.radius = detail::json_real(bj["radius"], "radius");
            if (!(s.radius > 0)) throw Error("geometry: radius must be positive");
            spec.blocks.emplace_back(s);
        } else if (kind == "complex_torus") {
            TorusBlock t;
            if (!bj.contains("area")) throw Error("geometry: complex_torus needs 'area'");
            t.area = detail::json_real(bj["area"], "area");
            if (bj.contains("modulus")) {
                t.modulus_re = detail::json_component(bj["modulus"], "modulus", 0);
                t.modulus_im = detail::json_component(bj["modulus"], "modulus", 1);
            }
            if (bj.contains("bundle_degree")) {
                if (!bj["bundle_degree"].is_number_integer())
                    throw Error("geometry: bundle_degree must be an integer");
                t.bundle_degree = bj["bundle_degree"].get<long>();
            }
            if (bj.contains("novikov_c")) {
                t.novikov_re = detail::json_component(bj["novikov_c"], "novikov_c", 0);
                t.novikov_im = detail::json_component(bj["novikov_c"], "novikov_c", 1);
            }
            if (!(t.area > 0)) throw Error("geometry: area must be positive");
            if (!(t.modulus_im > 0)) throw Error("geometry: modulus must have positive imaginary part");
            if (!boost::math::isfinite(t.novikov_re) || !boost::math::isfinite(t.novikov_im))
                throw Error("geometry: novikov_c must be finite");
            spec.blocks.emplace_back(t);
        } else {
            throw Error("geometry: unknown block kind '" + kind + "'");
        }
    }
    if (spec.blocks.empty()) throw Error("geometry: at least one block required");
    return spec;
}

inline GeometrySpec parse_geometry(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("geometry: invalid JSON: ") + e.what());
    }
    return parse_geometry_json(j);
}

inline GeometrySpec parse_geometry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("geometry: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_geometry(text);
}

inline Json geometry_to_json(const GeometrySpec& spec) {
    Json blocks = Json::array();
    for (const auto& b : spec.blocks) {
        Json bj;
        if (const auto* c = std::get_if<CircleBlock>(&b)) {
            bj["kind"] = "circle";
            bj["circumference"] = c->circumference.convert_to<double>();
            bj["witten_a"] = c->witten_a.convert_to<double>();
        } else if (const auto* s = std::get_if<SphereBlock>(&b)) {
            bj["kind"] = "sphere";
            bj["radius"] = s->radius.convert_to<double>();
        } else {
            const auto& t = std::get<TorusBlock>(b);
            bj["kind"] = "complex_torus";
            bj["area"] = t.area.convert_to<double>();
            bj["modulus"] = {t.modulus_re.convert_to<double>(), t.modulus_im.convert_to<double>()};
            bj["bundle_degree"] = t.bundle_degree;
            bj["novikov_c"] = {t.novikov_re.convert_to<double>(), t.novikov_im.convert_to<double>()};
        }
        blocks.push_back(bj);
    }
    Json out;
    out["blocks"] = blocks;
    return out;
}

// Compact human label ("S2 x T(d=1)" style) for reports and CLI output.
inline std::string describe(const GeometrySpec& spec) {
    std::string out;
    for (size_t i = 0; i < spec.blocks.size(); ++i) {
        if (i) out += " x ";
        const Block& b = spec.blocks[i];
        if (const auto* c = std::get_if<CircleBlock>(&b)) {
            out += "S1";
            if (c->witten_a != 0) out += "[a=" + to_display_string(c->witten_a, 6) + "]";
        } else if (const auto* s = std::get_if<SphereBlock>(&b)) {
            out += "S2";
            if (s->radius != 1) out += "[r=" + to_display_string(s->radius, 6) + "]";
        } else {
            const auto& t = std::get<TorusBlock>(b);
            out += "T[d=" + std::to_string(t.bundle_degree);
            if (t.area != 1) out += ",A=" + to_display_string(t.area, 6);
            if (t.modulus_re != 0 || t.modulus_im != 1)
                out += ",tau=" + to_display_string(t.modulus_re, 6) + "+" +
                       to_display_string(t.modulus_im, 6) + "i";
            if (t.novikov_re != 0 || t.novikov_im != 0)
                out += ",c=" + to_display_string(t.novikov_re, 6) + "+" +
                       to_display_string(t.novikov_im, 6) + "i";
            out += "]";
        }
    }
    return out;
}

// Exact per-block characteristic data.  Volumes and curvature integrals are
// exact in the dyadic values actually parsed, as elements of Q[pi^(±1/2)].
struct BlockCharData {
    std::string kind;
    PiHalfPoly volume;        // circle: L,  sphere: 4 pi r^2,  torus: A
    PiHalfPoly integral_tau;  // scalar curvature integral; sphere: 8 pi
    long c1_tangent{0};       // integral of c1 of the holomorphic tangent bundle
    long c1_bundle{0};        // integral of c1 of the twisting line bundle
};

struct CharRecord {
    int m{0};
    long euler{0};
    std::vector<BlockCharData> blocks;
    PiHalfPoly total_volume;
};

inline CharRecord char_record(const GeometrySpec& spec) {
    CharRecord rec;
    rec.m = spec.real_dimension();
    rec.euler = 1;
    rec.total_volume = PiHalfPoly(Rational(1));
    for (const auto& b : spec.blocks) {
        BlockCharData d;
        d.kind = block_kind(b);
        if (const auto* c = std::get_if<CircleBlock>(&b)) {
            // the default circumference is exactly the Real 2 pi; keep its
            // pi-structure so circle predictions print in closed form
            d.volume = (c->circumference == 2 * pi()) ? PiHalfPoly::term(2, 2)
                                                      : PiHalfPoly(to_rational(c->circumference));
            d.integral_tau = PiHalfPoly();
            rec.euler *= 0;
        } else if (const auto* s = std::get_if<SphereBlock>(&b)) {
            Rational r2 = to_rational(s->radius) * to_rational(s->radius);
            d.volume = PiHalfPoly::term(4 * r2, 2);      // 4 pi r^2
            d.integral_tau = PiHalfPoly::term(8, 2);     // (2/r^2) * 4 pi r^2
            d.c1_tangent = 2;
            rec.euler *= 2;
        } else {
            const auto& t = std::get<TorusBlock>(b);
            d.volume = PiHalfPoly(to_rational(t.area));
            d.integral_tau = PiHalfPoly();
            d.c1_bundle = t.bundle_degree;
            rec.euler *= 0;
        }
        rec.total_volume = rec.total_volume * d.volume;
        rec.blocks.push_back(std::move(d));
    }
    return rec;
}

}  // namespace heatlab
