#pragma once
// Exact characteristic numbers: Euler characteristic, Riemann-Roch index,
// and the predicted top/subleading derived-trace coefficients, all in the
// polynomial ring generated by per-block point classes.

#include "heatlab/exact.hpp"
#include "heatlab/geometry.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace heatlab {

// Element of Q[s_1..s_k]/(s_i^2), s_i the point class of block i (so the
// integral over the product reads off the full-support coefficient).
class ClassPoly {
  public:
    ClassPoly() = default;
    explicit ClassPoly(const Rational& c) {
        if (c != 0) terms_[0] = c;
    }
    static ClassPoly generator(size_t i, const Rational& c) {
        ClassPoly p;
        if (c != 0) p.terms_[uint32_t(1) << i] = c;
        return p;
    }

    ClassPoly& operator+=(const ClassPoly& o) {
        for (const auto& [m, c] : o.terms_) {
            Rational& slot = terms_[m];
            slot += c;
            if (slot == 0) terms_.erase(m);
        }
        return *this;
    }
    ClassPoly operator+(const ClassPoly& o) const {
        ClassPoly r = *this;
        r += o;
        return r;
    }
    ClassPoly operator*(const ClassPoly& o) const {
        ClassPoly r;
        for (const auto& [ma, ca] : terms_) {
            for (const auto& [mb, cb] : o.terms_) {
                if (ma & mb) continue;  // s_i^2 = 0
                Rational& slot = r.terms_[ma | mb];
                slot += ca * cb;
                if (slot == 0) r.terms_.erase(ma | mb);
            }
        }
        return r;
    }
    ClassPoly operator*(const Rational& c) const {
        ClassPoly r;
        if (c == 0) return r;
        for (const auto& [m, v] : terms_) r.terms_[m] = v * c;
        return r;
    }
    // Part of homogeneous degree k (k generators).
    ClassPoly degree_part(int k) const {
        ClassPoly r;
        for (const auto& [m, c] : terms_)
            if (__builtin_popcount(m) == k) r.terms_[m] = c;
        return r;
    }
    Rational coefficient(uint32_t mask) const {
        auto it = terms_.find(mask);
        return it == terms_.end() ? Rational(0) : it->second;
    }

  private:
    std::map<uint32_t, Rational> terms_;
};

namespace detail {
struct ComplexBlockData {
    long c1T;  // integral of c1 of the block tangent bundle: sphere 2, torus 0
    long c1E;  // integral of c1 of the block line bundle: torus degree, else 0
};

inline std::vector<ComplexBlockData> complex_block_data(const GeometrySpec& spec) {
    if (!spec.complex_admissible())
        throw Error("characteristic calculus on the Dolbeault side needs a circle-free geometry");
    if (spec.blocks.size() > 31) throw Error("too many blocks");
    std::vector<ComplexBlockData> out;
    for (const auto& b : spec.blocks) {
        if (std::holds_alternative<SphereBlock>(b)) {
            out.push_back({2, 0});
        } else {
            out.push_back({0, std::get<TorusBlock>(b).bundle_degree});
        }
    }
    return out;
}

inline ClassPoly c1_tangent(const std::vector<ComplexBlockData>& d) {
    ClassPoly p;
    for (size_t i = 0; i < d.size(); ++i) p += ClassPoly::generator(i, Rational(d[i].c1T));
    return p;
}
inline ClassPoly c1_bundle(const std::vector<ComplexBlockData>& d) {
    ClassPoly p;
    for (size_t i = 0; i < d.size(); ++i) p += ClassPoly::generator(i, Rational(d[i].c1E));
    return p;
}
// Total Chern class of the tangent bundle: prod_i (1 + c1T_i s_i).
inline ClassPoly chern_total(const std::vector<ComplexBlockData>& d) {
    ClassPoly p{Rational(1)};
    for (size_t i = 0; i < d.size(); ++i)
        p = p * (ClassPoly(Rational(1)) + ClassPoly::generator(i, Rational(d[i].c1T)));
    return p;
}
// Chern character of the line bundle: prod_i (1 + c1E_i s_i)  (s_i^2 = 0).
inline ClassPoly ch_bundle(const std::vector<ComplexBlockData>& d) {
    ClassPoly p{Rational(1)};
    for (size_t i = 0; i < d.size(); ++i)
        p = p * (ClassPoly(Rational(1)) + ClassPoly::generator(i, Rational(d[i].c1E)));
    return p;
}
inline uint32_t full_mask(size_t n) { return (uint32_t(1) << n) - 1; }
}  // namespace detail

// Euler characteristic: multiplicative over blocks (circle 0, sphere 2,
// torus 0).
inline long euler_char(const GeometrySpec& spec) {
    long chi = 1;
    for (const auto& b : spec.blocks) {
        if (std::holds_alternative<SphereBlock>(b)) {
            chi *= 2;
        } else {
            chi *= 0;
        }
    }
    return chi;
}

// Index polynomial evaluated exactly, complex dimension 1 or 2:
//   dim 1:  (1/2) c1(T) + c1(E)
//   dim 2:  Td2(T) + (1/2) c1(T) c1(E) + ch2(E),  Td2 = (c1^2 + c2)/12.
inline Rational index_formula(const GeometrySpec& spec) {
    auto d = detail::complex_block_data(spec);
    const uint32_t full = detail::full_mask(d.size());
    int mm = spec.complex_dimension();
    ClassPoly c1T = detail::c1_tangent(d);
    ClassPoly c1E = detail::c1_bundle(d);
    if (mm == 1) {
        ClassPoly p = c1T * Rational(1, 2) + c1E;
        return p.coefficient(full);
    }
    if (mm == 2) {
        ClassPoly c2T = detail::chern_total(d).degree_part(2);
        ClassPoly td2 = (c1T * c1T + c2T) * Rational(1, 12);
        ClassPoly ch2E = detail::ch_bundle(d).degree_part(2);
        ClassPoly p = td2 + c1T * c1E * Rational(1, 2) + ch2E;
        return p.coefficient(full);
    }
    throw Error("index_formula: closed form implemented through complex dimension 2");
}

// Riemann-Roch index, multiplicative over blocks (sphere 1, torus its
// bundle degree).  Checked against the index polynomial when that form
// exists; the two must agree exactly.
inline long rr_index(const GeometrySpec& spec) {
    auto d = detail::complex_block_data(spec);
    long idx = 1;
    for (const auto& bd : d) {
        if (bd.c1T == 2) {
            idx *= 1;  // sphere, trivial bundle
        } else {
            idx *= bd.c1E;
        }
    }
    int mm = spec.complex_dimension();
    if (mm <= 2 && index_formula(spec) != Rational(idx))
        throw Error("rr_index: multiplicative and polynomial paths disagree");
    return idx;
}

// Integral of c1(T)^a c1(E)^b over the product, exact.
inline Rational class_monomial(const GeometrySpec& spec, int a, int b) {
    auto d = detail::complex_block_data(spec);
    ClassPoly p{Rational(1)};
    for (int i = 0; i < a; ++i) p = p * detail::c1_tangent(d);
    for (int i = 0; i < b; ++i) p = p * detail::c1_bundle(d);
    return p.coefficient(detail::full_mask(d.size()));
}

struct Prediction {
    std::string id;
    PiHalfPoly value;
    std::string basis;  // which computation produced it
};

// Top derived coefficient, de Rham side: (m/2) * Euler characteristic, and
// independently the product recursion over block values (sphere 2, else 0).
// Both paths must agree exactly.
inline Prediction predicted_derived_top_de_rham(const GeometrySpec& spec) {
    long chi = euler_char(spec);
    Rational formula = Rational(spec.real_dimension(), 2) * chi;
    Rational recursion = 0;
    for (size_t i = 0; i < spec.blocks.size(); ++i) {
        Rational term = std::holds_alternative<SphereBlock>(spec.blocks[i]) ? 2 : 0;
        for (size_t j = 0; j < spec.blocks.size(); ++j) {
            if (j == i) continue;
            term *= std::holds_alternative<SphereBlock>(spec.blocks[j]) ? 2 : 0;
        }
        recursion += term;
    }
    if (formula != recursion)
        throw Error("predicted_derived_top (de Rham): formula and recursion disagree");
    return {"derived-top", PiHalfPoly(formula), "half-dimension times Euler characteristic; product recursion"};
}

// Top derived coefficient, Dolbeault side.  Product recursion:
//   sum_i r_i * prod_{j != i} index_j,  r_sphere = 2/3, r_torus = d/2.
// Closed polynomial for complex dimension 1 and 2:
//   dim 1:  (1/3) c1(T) + (1/2) c1(E)
//   dim 2:  (Td2 + c1^2/24)(T) + (7/12) c1(T) c1(E) + ch2(E).
// When both paths exist they must agree exactly.
inline Prediction predicted_derived_top_dolbeault(const GeometrySpec& spec) {
    auto d = detail::complex_block_data(spec);
    Rational recursion = 0;
    for (size_t i = 0; i < d.size(); ++i) {
        Rational term = d[i].c1T == 2 ? Rational(2, 3) : Rational(d[i].c1E, 2);
        for (size_t j = 0; j < d.size(); ++j) {
            if (j == i) continue;
            term *= d[j].c1T == 2 ? 1 : d[j].c1E;
        }
        recursion += term;
    }
    int mm = spec.complex_dimension();
    std::string basis = "product recursion over block coefficients";
    if (mm <= 2) {
        const uint32_t full = detail::full_mask(d.size());
        ClassPoly c1T = detail::c1_tangent(d);
        ClassPoly c1E = detail::c1_bundle(d);
        Rational formula;
        if (mm == 1) {
            formula = (c1T * Rational(1, 3) + c1E * Rational(1, 2)).coefficient(full);
        } else {
            ClassPoly c2T = detail::chern_total(d).degree_part(2);
            ClassPoly p2 = (c1T * c1T + c2T) * Rational(1, 12) + c1T * c1T * Rational(1, 24);
            ClassPoly ch2E = detail::ch_bundle(d).degree_part(2);
            formula = (p2 + c1T * c1E * Rational(7, 12) + ch2E).coefficient(full);
        }
        if (formula != recursion)
            throw Error("predicted_derived_top (Dolbeault): formula and recursion disagree");
        basis = "top-degree characteristic polynomial; product recursion";
    }
    return {"derived-top", PiHalfPoly(recursion), basis};
}

inline Prediction predicted_derived_top(const GeometrySpec& spec, bool dolbeault) {
    return dolbeault ? predicted_derived_top_dolbeault(spec) : predicted_derived_top_de_rham(spec);
}

// Order m-2 derived coefficient, Dolbeault side:
//   sum_i ( -vol_i / (4 pi) ) * prod_{j != i} index_j.
inline Prediction predicted_subleading(const GeometrySpec& spec) {
    auto d = detail::complex_block_data(spec);
    CharRecord rec = char_record(spec);
    PiHalfPoly total;
    const PiHalfPoly inv_4pi = PiHalfPoly::term(Rational(-1, 4), -2);
    for (size_t i = 0; i < d.size(); ++i) {
        PiHalfPoly term = rec.blocks[i].volume * inv_4pi;
        for (size_t j = 0; j < d.size(); ++j) {
            if (j == i) continue;
            term = term * Rational(d[j].c1T == 2 ? 1 : d[j].c1E);
        }
        total += term;
    }
    return {"subleading", total, "block volume series term times complementary indices"};
}

}  // namespace heatlab
