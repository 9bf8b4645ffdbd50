#pragma once
// Certified heat traces: per-grading evaluation over a spectrum table,
// graded aggregates, and the exact block factorization for products.

#include "heatlab/spectra.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace heatlab {

struct Ladder {
    Real t0{Real(1) / 2};
    Real ratio{Real(7) / 10};
    int count{14};

    std::vector<Real> points() const {
        if (!(t0 > 0) || !(ratio > 0) || !(ratio < 1) || count < 1)
            throw Error("ladder: need t0 > 0, 0 < ratio < 1, count >= 1");
        std::vector<Real> ts;
        Real t = t0;
        for (int i = 0; i < count; ++i) {
            ts.push_back(t);
            t *= ratio;
        }
        return ts;
    }
    Real t_min() const { return points().back(); }
};

// "T0:RATIO:COUNT"
inline Ladder parse_ladder(const std::string& s) {
    Ladder l;
    auto p1 = s.find(':');
    auto p2 = s.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw Error("ladder: expected T0:RATIO:COUNT, got '" + s + "'");
    try {
        l.t0 = Real(s.substr(0, p1));
        l.ratio = Real(s.substr(p1 + 1, p2 - p1 - 1));
        l.count = std::stoi(s.substr(p2 + 1));
    } catch (const std::exception&) {
        throw Error("ladder: cannot parse '" + s + "'");
    }
    l.points();  // validate
    return l;
}

struct TraceSample {
    Real t;
    std::vector<Real> values;  // per grading
    std::vector<Real> bounds;  // per grading certified truncation bounds
};

// Evaluate all graded traces at one t.  Lines are walked in ascending order
// with a chained-exponential factor; once the remaining suffix cannot exceed
// eps_skip it is dropped and charged to the bound.  The accumulated terms
// are then summed in descending eigenvalue order with compensated addition.
inline TraceSample graded_trace(const GradedSpectrum& sp, const Real& t,
                                const Real& eps_skip = Real("1e-27")) {
    if (!(t > 0)) throw Error("graded_trace: t must be positive");
    TraceSample out;
    out.t = t;
    for (size_t g = 0; g < sp.lines.size(); ++g) {
        if (t < sp.tails[g].t_min)
            throw Error("graded_trace: t below the certificate validity of this spectrum");
        const auto& ls = sp.lines[g];
        std::vector<Real> terms;
        terms.reserve(ls.size());
        std::map<Real, Real> delta_cache;
        Real factor = 0;
        Real skipped = 0;
        for (size_t i = 0; i < ls.size(); ++i) {
            if (i == 0) {
                factor = exp(-t * ls[0].lambda);
            } else {
                Real d = ls[i].lambda - ls[i - 1].lambda;
                auto it = delta_cache.find(d);
                if (it == delta_cache.end()) it = delta_cache.emplace(d, exp(-t * d)).first;
                factor *= it->second;
            }
            Real rest = factor * Real(sp.suffix_mult[g][i]);
            if (rest <= eps_skip) {
                skipped = rest;
                break;
            }
            terms.push_back(factor * Real(ls[i].mult));
        }
        StableSum sum;
        for (size_t i = terms.size(); i-- > 0;) sum.add(terms[i]);
        out.values.push_back(sum.value());
        out.bounds.push_back(sp.tails[g].bound(t) + skipped);
    }
    return out;
}

// graded_trace plus the tail-budget invariant: every grading's truncation
// bound must stay below eps_tail.
inline TraceSample certified_trace(const GradedSpectrum& sp, const Real& t, const Real& eps_tail) {
    TraceSample s = graded_trace(sp, t, eps_tail / 4);
    for (const Real& b : s.bounds) {
        if (!(b < eps_tail))
            throw Error("certified_trace: truncation bound exceeds the tail budget at t = " +
                        to_display_string(t, 8) + "; raise the cutoff (rebuild for smaller t_min)");
    }
    return s;
}

struct Aggregate {
    enum class Mode { Super, Derived, SEval } mode{Mode::Super};
    Real s{1};

    std::string name() const {
        switch (mode) {
            case Mode::Super: return "super";
            case Mode::Derived: return "derived";
            default: return "s:" + to_display_string(s, 12);
        }
    }
};

inline Aggregate parse_aggregate(const std::string& s) {
    Aggregate a;
    if (s == "super") {
        a.mode = Aggregate::Mode::Super;
    } else if (s == "derived") {
        a.mode = Aggregate::Mode::Derived;
    } else if (s.rfind("s:", 0) == 0) {
        a.mode = Aggregate::Mode::SEval;
        try {
            a.s = Real(s.substr(2));
        } catch (const std::exception&) {
            throw Error("aggregate: cannot parse '" + s + "'");
        }
    } else {
        throw Error("aggregate: expected super, derived, or s:VALUE");
    }
    return a;
}

// Grading weight of the aggregate: super (-1)^p, derived (-1)^p p,
// s-evaluation (-1)^p s^p.
inline Real aggregate_weight(const Aggregate& a, int p) {
    Real sign = (p % 2 == 0) ? 1 : -1;
    switch (a.mode) {
        case Aggregate::Mode::Super: return sign;
        case Aggregate::Mode::Derived: return sign * p;
        default: return sign * pow(a.s, p);
    }
}

inline Real aggregate_value(const TraceSample& s, const Aggregate& a) {
    Real v = 0;
    for (size_t p = 0; p < s.values.size(); ++p) v += aggregate_weight(a, static_cast<int>(p)) * s.values[p];
    return v;
}

inline Real aggregate_bound(const TraceSample& s, const Aggregate& a) {
    Real b = 0;
    for (size_t p = 0; p < s.bounds.size(); ++p)
        b += abs(aggregate_weight(a, static_cast<int>(p))) * s.bounds[p];
    return b;
}

struct AggValue {
    Real value;
    Real bound;
};

namespace detail {
// |prod(v_i +- e_i) - prod(v_i)| <= prod(|v_i| + e_i) - prod(|v_i|)
inline Real product_error(const std::vector<Real>& v, const std::vector<Real>& e, size_t skip = SIZE_MAX) {
    Real wide = 1, mid = 1;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i == skip) continue;
        wide *= abs(v[i]) + e[i];
        mid *= abs(v[i]);
    }
    return wide - mid;
}
}  // namespace detail

// Aggregates of a product geometry evaluated through the exact trace
// factorization: the s-evaluation multiplies over blocks, the supertrace is
// its s=1 value, and the derived trace is its s-derivative at s=1 by the
// Leibniz rule.  Error bounds propagate as rigorous intervals.
class FactoredTrace {
  public:
    FactoredTrace(std::vector<GradedSpectrum> blocks, Real eps_tail)
        : blocks_(std::move(blocks)), eps_tail_(std::move(eps_tail)) {}

    const std::vector<GradedSpectrum>& blocks() const { return blocks_; }

    AggValue evaluate(const Real& t, const Aggregate& agg) const {
        std::vector<TraceSample> samples;
        samples.reserve(blocks_.size());
        for (const auto& b : blocks_) samples.push_back(certified_trace(b, t, eps_tail_));

        const size_t n = samples.size();
        if (agg.mode != Aggregate::Mode::Derived) {
            std::vector<Real> v(n), e(n);
            for (size_t i = 0; i < n; ++i) {
                v[i] = aggregate_value(samples[i], agg);
                e[i] = aggregate_bound(samples[i], agg);
            }
            Real value = 1;
            for (const auto& x : v) value *= x;
            return {value, detail::product_error(v, e)};
        }
        Aggregate sup;
        sup.mode = Aggregate::Mode::Super;
        Aggregate der;
        der.mode = Aggregate::Mode::Derived;
        std::vector<Real> s(n), es(n), d(n), ed(n);
        for (size_t i = 0; i < n; ++i) {
            s[i] = aggregate_value(samples[i], sup);
            es[i] = aggregate_bound(samples[i], sup);
            d[i] = aggregate_value(samples[i], der);
            ed[i] = aggregate_bound(samples[i], der);
        }
        Real value = 0, bound = 0;
        for (size_t i = 0; i < n; ++i) {
            Real term = d[i];
            for (size_t j = 0; j < n; ++j)
                if (j != i) term *= s[j];
            value += term;
            // wide product with slot i replaced by the d-interval
            Real wide = abs(d[i]) + ed[i], mid = abs(d[i]);
            for (size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                wide *= abs(s[j]) + es[j];
                mid *= abs(s[j]);
            }
            bound += wide - mid;
        }
        return {value, bound};
    }

  private:
    std::vector<GradedSpectrum> blocks_;
    Real eps_tail_;
};

struct IdentityRow {
    Real t;
    Real lhs, rhs;
    Real error;
    Real bound;
};

// Exact-in-t product identity: the derived trace of the direct product
// spectrum against the block factorization, per ladder point.
inline std::vector<IdentityRow> product_derived_identity(const GradedSpectrum& direct,
                                                         const FactoredTrace& factored,
                                                         const Ladder& ladder, const Real& eps_tail) {
    Aggregate der;
    der.mode = Aggregate::Mode::Derived;
    std::vector<IdentityRow> rows;
    for (const Real& t : ladder.points()) {
        TraceSample s = certified_trace(direct, t, eps_tail);
        Real lhs = aggregate_value(s, der);
        Real lhs_b = aggregate_bound(s, der);
        AggValue rhs = factored.evaluate(t, der);
        rows.push_back({t, lhs, rhs.value, abs(lhs - rhs.value), lhs_b + rhs.bound});
    }
    return rows;
}

}  // namespace heatlab
