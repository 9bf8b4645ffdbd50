#pragma once
// Exact graded Laplacian spectra for the model blocks and their products,
// each carrying a certified closed-form bound on the truncated mass.

#include "heatlab/geometry.hpp"
#include "heatlab/real.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace heatlab {

struct SpectralLine {
    Real lambda;
    long long mult;
};

// Upper bound on  sum_{dropped lines} mult * exp(-t * lambda),
// valid for every t >= t_min.
struct TailCertificate {
    std::function<Real(const Real& t)> bound;
    Real t_min{0};
    std::string form;
};

enum class ComplexKind { DeRham, Dolbeault };

inline std::string kind_name(ComplexKind k) {
    return k == ComplexKind::DeRham ? "derham" : "dolbeault";
}
inline ComplexKind parse_kind(const std::string& s) {
    if (s == "derham") return ComplexKind::DeRham;
    if (s == "dolbeault") return ComplexKind::Dolbeault;
    throw Error("unknown complex kind '" + s + "' (expected derham or dolbeault)");
}

// All eigenvalues <= cutoff of the graded Laplacian, one line list per
// grading (form degree p, or antiholomorphic degree q), sorted ascending
// with exactly-equal values merged.
struct GradedSpectrum {
    ComplexKind kind{ComplexKind::DeRham};
    int m{0};    // real dimension
    int top{0};  // highest grading
    Real cutoff{0};
    std::vector<std::vector<SpectralLine>> lines;
    std::vector<TailCertificate> tails;
    std::vector<std::vector<long long>> suffix_mult;  // suffix sums for eval early-stop

    void finalize() {
        for (auto& ls : lines) {
            std::sort(ls.begin(), ls.end(),
                      [](const SpectralLine& a, const SpectralLine& b) { return a.lambda < b.lambda; });
            std::vector<SpectralLine> merged;
            for (const auto& l : ls) {
                if (!merged.empty() && merged.back().lambda == l.lambda) {
                    merged.back().mult += l.mult;
                } else {
                    merged.push_back(l);
                }
            }
            ls = std::move(merged);
        }
        suffix_mult.assign(lines.size(), {});
        for (size_t g = 0; g < lines.size(); ++g) {
            const auto& ls = lines[g];
            suffix_mult[g].assign(ls.size() + 1, 0);
            for (size_t i = ls.size(); i-- > 0;)
                suffix_mult[g][i] = suffix_mult[g][i + 1] + ls[i].mult;
        }
    }

    long long total_lines() const {
        long long n = 0;
        for (const auto& ls : lines) n += static_cast<long long>(ls.size());
        return n;
    }
    // Counting function N_g(x) = total multiplicity of eigenvalues <= x.
    long long count_leq(int grading, const Real& x) const {
        long long n = 0;
        for (const auto& l : lines[grading]) {
            if (l.lambda > x) break;
            n += l.mult;
        }
        return n;
    }
};

namespace detail {

// sum_{j > N} 8 j exp(-t lh(j))  for convex increasing lh beyond N:
//   <= 8 exp(-t lh(N+1)) [ (N+1)/(1-rho) + rho/(1-rho)^2 ],
//   rho = exp(-t (lh(N+2) - lh(N+1))).
inline Real lattice_shell_tail(const std::function<Real(long long)>& lh, long long N, const Real& t) {
    Real l1 = lh(N + 1);
    Real gap = lh(N + 2) - l1;
    if (!(gap > 0)) return Real(std::numeric_limits<double>::infinity());
    Real rho = exp(-t * gap);
    Real one_m = 1 - rho;
    return 8 * exp(-t * l1) * (Real(N + 1) / one_m + rho / (one_m * one_m));
}

// Dual lattice basis and Gram data for a torus of given area and modulus.
struct DualLattice {
    Real mu1x, mu1y, mu2x, mu2y;  // dual basis vectors
    Real g11, g12, g22;           // Gram matrix of the dual basis
    Real gamma;                   // least eigenvalue of the Gram matrix
};

inline DualLattice dual_lattice(const TorusBlock& tb) {
    DualLattice d;
    Real s = sqrt(tb.area / tb.modulus_im);
    d.mu1x = Real(1) / s;
    d.mu1y = -tb.modulus_re / (s * tb.modulus_im);
    d.mu2x = 0;
    d.mu2y = Real(1) / (s * tb.modulus_im);
    d.g11 = d.mu1x * d.mu1x + d.mu1y * d.mu1y;
    d.g12 = d.mu1x * d.mu2x + d.mu1y * d.mu2y;
    d.g22 = d.mu2x * d.mu2x + d.mu2y * d.mu2y;
    Real half_tr = (d.g11 + d.g22) / 2;
    Real disc = sqrt((d.g11 - d.g22) * (d.g11 - d.g22) / 4 + d.g12 * d.g12);
    d.gamma = half_tr - disc;
    return d;
}

// Enumerate one torus lattice family: lambda(n1, n2) given by `point_lambda`,
// bounded below on the sup-norm shell j by `lh(j)` (increasing for
// j >= j_monotone).  Returns merged value table and the certified tail.
struct LatticeFamily {
    std::vector<SpectralLine> values;  // multiplicity counts lattice points
    TailCertificate tail;              // per unit multiplicity
};

inline LatticeFamily enumerate_lattice(const std::function<Real(long long, long long)>& point_lambda,
                                       const std::function<Real(long long)>& lh, long long j_monotone,
                                       const Real& cutoff, const std::string& form) {
    std::map<Real, long long> acc;
    long long last_full = -1;  // shells 0..last_full entirely below the cutoff
    bool prefix_full = true;
    for (long long j = 0;; ++j) {
        if (j >= j_monotone && lh(j) > cutoff) break;  // no kept point here or beyond
        if (j > 60000000) throw Error("lattice enumeration runaway (cutoff too large)");
        bool shell_all_kept = true;
        auto visit = [&](long long n1, long long n2) {
            Real l = point_lambda(n1, n2);
            if (l <= cutoff) {
                acc[l] += 1;
            } else {
                shell_all_kept = false;
            }
        };
        if (j == 0) {
            visit(0, 0);
        } else {
            for (long long n = -j; n <= j; ++n) {
                visit(n, j);
                visit(n, -j);
            }
            for (long long n = -j + 1; n <= j - 1; ++n) {
                visit(j, n);
                visit(-j, n);
            }
        }
        prefix_full = prefix_full && shell_all_kept;
        if (prefix_full) last_full = j;
    }
    LatticeFamily fam;
    fam.values.reserve(acc.size());
    for (const auto& [l, c] : acc) fam.values.push_back({l, c});
    // Dropped points lie outside shells 0..last_full.  The shell bound needs
    // lh increasing beyond the start index; otherwise report no certificate
    // (infinite bound) and let the cutoff search enlarge the table.
    const long long N = last_full;
    fam.tail.form = form;
    fam.tail.bound = [lh, N, j_monotone](const Real& t) {
        long long start = N >= 0 ? N : 0;
        Real extra = 0;
        if (N < 0) extra = exp(-t * lh(0));  // origin itself was dropped
        if (start + 1 < j_monotone) return Real(std::numeric_limits<double>::infinity());
        return extra + lattice_shell_tail(lh, start, t);
    };
    return fam;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Block spectra
// ---------------------------------------------------------------------------

// Circle of circumference L with closed 1-form deformation a:
// both gradings carry (2 pi k / L)^2 + a^2, k in Z.
inline GradedSpectrum circle_spectrum(const CircleBlock& cb, const Real& cutoff) {
    GradedSpectrum sp;
    sp.kind = ComplexKind::DeRham;
    sp.m = 1;
    sp.top = 1;
    sp.cutoff = cutoff;
    Real beta = (2 * pi() / cb.circumference) * (2 * pi() / cb.circumference);
    Real a2 = cb.witten_a * cb.witten_a;
    std::vector<SpectralLine> ls;
    long long K = -1;
    for (long long k = 0;; ++k) {
        Real lam = beta * Real(k) * Real(k) + a2;
        if (lam > cutoff) break;
        ls.push_back({lam, k == 0 ? 1LL : 2LL});
        K = k;
    }
    const long long Kc = K;
    TailCertificate tc;
    tc.form = "2 exp(-t(beta (K+1)^2 + a^2)) / (1 - exp(-t beta (2K+3))), beta=(2pi/L)^2";
    tc.bound = [beta, a2, Kc](const Real& t) {
        Real top = 2 * exp(-t * (beta * Real(Kc + 1) * Real(Kc + 1) + a2));
        Real den = 1 - exp(-t * beta * Real(2 * Kc + 3));
        if (!(den > 0)) return Real(std::numeric_limits<double>::infinity());
        return top / den;
    };
    sp.lines = {ls, ls};
    sp.tails = {tc, tc};
    sp.finalize();
    return sp;
}

namespace detail {
// Tail of sum_{l > L} (2l+1) exp(-t l(l+1)/r^2), times `scale`.
inline TailCertificate sphere_series_tail(const Real& r2, long long L, long long scale) {
    TailCertificate tc;
    tc.form = "scale * exp(-t(L+1)(L+2)/r^2) [ (2L+3)/(1-rho) + 2 rho/(1-rho)^2 ], rho=exp(-2t(L+2)/r^2)";
    tc.bound = [r2, L, scale](const Real& t) {
        Real lam0 = Real((L + 1) * (L + 2)) / r2;
        Real rho = exp(-2 * t * Real(L + 2) / r2);
        Real one_m = 1 - rho;
        if (!(one_m > 0)) return Real(std::numeric_limits<double>::infinity());
        return Real(scale) * exp(-t * lam0) * (Real(2 * L + 3) / one_m + 2 * rho / (one_m * one_m));
    };
    return tc;
}
}  // namespace detail

// Round 2-sphere of radius r, de Rham complex:
//   p=0,2: l(l+1)/r^2 with multiplicity 2l+1, l >= 0;
//   p=1:   l(l+1)/r^2 with multiplicity 2(2l+1), l >= 1.
inline GradedSpectrum sphere_de_rham_spectrum(const SphereBlock& sb, const Real& cutoff) {
    GradedSpectrum sp;
    sp.kind = ComplexKind::DeRham;
    sp.m = 2;
    sp.top = 2;
    sp.cutoff = cutoff;
    Real r2 = sb.radius * sb.radius;
    std::vector<SpectralLine> p0, p1;
    long long L = -1;
    for (long long l = 0;; ++l) {
        Real lam = Real(l * (l + 1)) / r2;
        if (lam > cutoff) break;
        p0.push_back({lam, 2 * l + 1});
        if (l >= 1) p1.push_back({lam, 2 * (2 * l + 1)});
        L = l;
    }
    sp.lines = {p0, p1, p0};
    sp.tails = {detail::sphere_series_tail(r2, L, 1), detail::sphere_series_tail(r2, L, 2),
                detail::sphere_series_tail(r2, L, 1)};
    sp.finalize();
    return sp;
}

// Round 2-sphere, Dolbeault complex of the trivial line bundle (the factor-2
// normalization makes the (0,0) operator the scalar Laplacian):
//   q=0: l(l+1)/r^2 with multiplicity 2l+1, l >= 0;
//   q=1: l(l+1)/r^2 with multiplicity 2l+1, l >= 1.
inline GradedSpectrum sphere_dolbeault_spectrum(const SphereBlock& sb, const Real& cutoff) {
    GradedSpectrum sp;
    sp.kind = ComplexKind::Dolbeault;
    sp.m = 2;
    sp.top = 1;
    sp.cutoff = cutoff;
    Real r2 = sb.radius * sb.radius;
    std::vector<SpectralLine> q0, q1;
    long long L = -1;
    for (long long l = 0;; ++l) {
        Real lam = Real(l * (l + 1)) / r2;
        if (lam > cutoff) break;
        q0.push_back({lam, 2 * l + 1});
        if (l >= 1) q1.push_back({lam, 2 * l + 1});
        L = l;
    }
    sp.lines = {q0, q1};
    sp.tails = {detail::sphere_series_tail(r2, L, 1), detail::sphere_series_tail(r2, L, 1)};
    sp.finalize();
    return sp;
}

// Flat complex torus, de Rham complex with Witten deformation Re(c dz):
// lambda(mu) = 4 pi^2 |mu|^2 + |c|^2 over the dual lattice, multiplicity
// binom(2,p) per lattice point.  The bundle plays no role here.
inline GradedSpectrum torus_de_rham_spectrum(const TorusBlock& tb, const Real& cutoff) {
    GradedSpectrum sp;
    sp.kind = ComplexKind::DeRham;
    sp.m = 2;
    sp.top = 2;
    sp.cutoff = cutoff;
    auto dl = detail::dual_lattice(tb);
    Real shift = tb.novikov_re * tb.novikov_re + tb.novikov_im * tb.novikov_im;
    Real four_pi2 = 4 * pi() * pi();
    auto point_lambda = [dl, shift, four_pi2](long long n1, long long n2) {
        Real q = dl.g11 * Real(n1) * Real(n1) + 2 * dl.g12 * Real(n1) * Real(n2) +
                 dl.g22 * Real(n2) * Real(n2);
        return four_pi2 * q + shift;
    };
    Real base = four_pi2 * dl.gamma;
    auto lh = [base, shift](long long j) { return base * Real(j) * Real(j) + shift; };
    auto fam = detail::enumerate_lattice(point_lambda, lh, 0, cutoff,
                                         "shell bound, lh(j) = 4 pi^2 gamma j^2 + |c|^2");
    const long long mult_p[3] = {1, 2, 1};
    sp.lines.resize(3);
    sp.tails.resize(3);
    for (int p = 0; p <= 2; ++p) {
        for (const auto& v : fam.values) sp.lines[p].push_back({v.lambda, v.mult * mult_p[p]});
        TailCertificate tc;
        long long mp = mult_p[p];
        auto inner = fam.tail.bound;
        tc.form = fam.tail.form + std::string(", x") + std::to_string(mp);
        tc.bound = [inner, mp](const Real& t) { return Real(mp) * inner(t); };
        sp.tails[p] = tc;
    }
    sp.finalize();
    return sp;
}

// Flat complex torus, Dolbeault complex.
//   degree d != 0: Landau ladder 2Bk with B = 2 pi |d| / A, multiplicity |d|;
//     d > 0: q=0 from k=0, q=1 from k=1;  d < 0: the gradings swap.
//   degree d == 0: lambda(mu) = 4 |pi i mu + conj(c)|^2 on both gradings.
inline GradedSpectrum torus_dolbeault_spectrum(const TorusBlock& tb, const Real& cutoff) {
    GradedSpectrum sp;
    sp.kind = ComplexKind::Dolbeault;
    sp.m = 2;
    sp.top = 1;
    sp.cutoff = cutoff;
    const bool deformed = tb.novikov_re != 0 || tb.novikov_im != 0;
    if (tb.bundle_degree != 0) {
        if (deformed)
            throw Error("unsupported feature: Novikov deformation with a nontrivial bundle degree");
        long long ad = tb.bundle_degree > 0 ? tb.bundle_degree : -tb.bundle_degree;
        Real B = 2 * pi() * Real(ad) / tb.area;
        Real twoB = 2 * B;
        std::vector<SpectralLine> from0, from1;
        long long K = -1;
        for (long long k = 0;; ++k) {
            Real lam = twoB * Real(k);
            if (lam > cutoff) break;
            from0.push_back({lam, ad});
            if (k >= 1) from1.push_back({lam, ad});
            K = k;
        }
        const long long Kc = K;
        TailCertificate tc;
        tc.form = "|d| exp(-2B(K+1)t) / (1 - exp(-2Bt)), B = 2 pi |d| / A";
        tc.bound = [twoB, Kc, ad](const Real& t) {
            Real den = 1 - exp(-t * twoB);
            if (!(den > 0)) return Real(std::numeric_limits<double>::infinity());
            return Real(ad) * exp(-t * twoB * Real(Kc + 1)) / den;
        };
        if (tb.bundle_degree > 0) {
            sp.lines = {from0, from1};
        } else {
            sp.lines = {from1, from0};
        }
        sp.tails = {tc, tc};
        sp.finalize();
        return sp;
    }
    // d == 0: Novikov family over the dual lattice, both gradings equal.
    auto dl = detail::dual_lattice(tb);
    Real cre = tb.novikov_re, cim = tb.novikov_im;
    auto point_lambda = [dl, cre, cim](long long n1, long long n2) {
        Real mux = Real(n1) * dl.mu1x + Real(n2) * dl.mu2x;
        Real muy = Real(n1) * dl.mu1y + Real(n2) * dl.mu2y;
        Real wre = cre - pi() * muy;
        Real wim = pi() * mux - cim;
        return 4 * (wre * wre + wim * wim);
    };
    Real cabs = sqrt(cre * cre + cim * cim);
    Real pg = pi() * sqrt(dl.gamma);
    auto lh = [pg, cabs](long long j) {
        Real x = pg * Real(j) - cabs;
        if (x < 0) x = 0;
        return 4 * x * x;
    };
    long long j_mono = 0;
    while (pg * Real(j_mono) < cabs) ++j_mono;  // lh increasing from here on
    auto fam = detail::enumerate_lattice(point_lambda, lh, j_mono, cutoff,
                                         "shell bound, lh(j) = 4 (pi sqrt(gamma) j - |c|)^2");
    sp.lines = {fam.values, fam.values};
    sp.tails = {fam.tail, fam.tail};
    sp.finalize();
    return sp;
}

inline GradedSpectrum block_spectrum(const Block& b, ComplexKind kind, const Real& cutoff) {
    if (const auto* c = std::get_if<CircleBlock>(&b)) {
        if (kind == ComplexKind::Dolbeault)
            throw Error("unsupported feature: a circle factor has no Dolbeault complex");
        return circle_spectrum(*c, cutoff);
    }
    if (const auto* s = std::get_if<SphereBlock>(&b)) {
        return kind == ComplexKind::DeRham ? sphere_de_rham_spectrum(*s, cutoff)
                                           : sphere_dolbeault_spectrum(*s, cutoff);
    }
    const auto& t = std::get<TorusBlock>(b);
    return kind == ComplexKind::DeRham ? torus_de_rham_spectrum(t, cutoff)
                                       : torus_dolbeault_spectrum(t, cutoff);
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

namespace detail {
// Cached per-t sums used by product tail certificates: for each grading of a
// factor spectrum, S = (sum of kept lines) + tail  and  U = (sum of kept
// lines above lambda > half) + tail.
struct FactorSums {
    std::shared_ptr<const GradedSpectrum> sp;
    Real half;
    std::map<Real, std::vector<std::pair<Real, Real>>> cache;

    const std::vector<std::pair<Real, Real>>& at(const Real& t) {
        auto it = cache.find(t);
        if (it != cache.end()) return it->second;
        std::vector<std::pair<Real, Real>> out;
        for (size_t g = 0; g < sp->lines.size(); ++g) {
            Real s = 0, u = 0;
            for (const auto& l : sp->lines[g]) {
                Real term = Real(l.mult) * exp(-t * l.lambda);
                s += term;
                if (l.lambda > half) u += term;
            }
            Real tl = sp->tails[g].bound(t);
            out.emplace_back(s + tl, u + tl);
        }
        return cache.emplace(t, std::move(out)).first->second;
    }
};
}  // namespace detail

namespace detail {
// Tail certificates of the Minkowski product at `cutoff`, from factor data
// alone: per grading p,
//   sum_{p1+p2=p} U_a(p1) S_b(p2) + S_a(p1) U_b(p2)
// where S bounds a factor's full graded trace from above and U its part
// above cutoff/2 (any dropped pair exceeds cutoff/2 in at least one factor).
inline std::vector<TailCertificate> product_tails(const std::shared_ptr<const GradedSpectrum>& pa,
                                                  const std::shared_ptr<const GradedSpectrum>& pb,
                                                  const Real& cutoff) {
    auto fa = std::make_shared<FactorSums>();
    fa->sp = pa;
    fa->half = cutoff / 2;
    auto fb = std::make_shared<FactorSums>();
    fb->sp = pb;
    fb->half = cutoff / 2;
    Real t_min_valid = pa->tails[0].t_min > pb->tails[0].t_min ? pa->tails[0].t_min : pb->tails[0].t_min;
    const int top = pa->top + pb->top;
    std::vector<TailCertificate> tails(top + 1);
    for (int p = 0; p <= top; ++p) {
        std::vector<std::pair<int, int>> comps;
        for (int p1 = 0; p1 <= pa->top; ++p1) {
            int p2 = p - p1;
            if (p2 >= 0 && p2 <= pb->top) comps.emplace_back(p1, p2);
        }
        TailCertificate tc;
        tc.t_min = t_min_valid;
        tc.form = "sum over compositions of U_a S_b + S_a U_b at half-cutoff split";
        tc.bound = [fa, fb, comps](const Real& t) {
            const auto& sa = fa->at(t);
            const auto& sb = fb->at(t);
            Real total = 0;
            for (const auto& [p1, p2] : comps) {
                total += sa[p1].second * sb[p2].first + sa[p1].first * sb[p2].second;
            }
            return total;
        };
        tails[p] = tc;
    }
    return tails;
}
}  // namespace detail

// Minkowski-sum spectrum of a product: per grading p, all sums
// lambda_a + lambda_b <= cutoff over compositions p = p1 + p2, with the
// dropped mass certified from the factor spectra.
inline GradedSpectrum product_spectrum(const GradedSpectrum& a, const GradedSpectrum& b) {
    if (a.kind != b.kind) throw Error("product_spectrum: mixed complex kinds");
    GradedSpectrum sp;
    sp.kind = a.kind;
    sp.m = a.m + b.m;
    sp.top = a.top + b.top;
    sp.cutoff = a.cutoff < b.cutoff ? a.cutoff : b.cutoff;
    sp.lines.resize(sp.top + 1);

    long long budget = 40000000;
    for (int p = 0; p <= sp.top; ++p) {
        std::map<Real, long long> acc;
        for (int p1 = 0; p1 <= a.top; ++p1) {
            int p2 = p - p1;
            if (p2 < 0 || p2 > b.top) continue;
            for (const auto& la : a.lines[p1]) {
                if (la.lambda > sp.cutoff) break;
                for (const auto& lb : b.lines[p2]) {
                    Real lam = la.lambda + lb.lambda;
                    if (lam > sp.cutoff) break;
                    acc[lam] += la.mult * lb.mult;
                    if (--budget < 0)
                        throw Error("product_spectrum: table exceeds the line budget; "
                                    "lower the cutoff or use the factored trace path");
                }
            }
        }
        sp.lines[p].reserve(acc.size());
        for (const auto& [lam, mult] : acc) sp.lines[p].push_back({lam, mult});
    }
    sp.tails = detail::product_tails(std::make_shared<GradedSpectrum>(a),
                                     std::make_shared<GradedSpectrum>(b), sp.cutoff);
    sp.finalize();
    return sp;
}

// ---------------------------------------------------------------------------
// Cutoff policy: smallest cutoff whose certified tail at t_min stays within
// the target, found by doubling then bisection.
// ---------------------------------------------------------------------------

namespace detail {
template <class BuildFn>
GradedSpectrum solve_cutoff(BuildFn build, const Real& t_min, const Real& eps_target) {
    auto worst = [&](const GradedSpectrum& sp) {
        Real w = 0;
        for (const auto& tc : sp.tails) {
            Real b = tc.bound(t_min);
            if (!(b == b)) return Real(std::numeric_limits<double>::infinity());
            if (b > w) w = b;
        }
        return w;
    };
    Real hi = Real(2) * (log(Real(1) / eps_target) + 8) / t_min;
    GradedSpectrum sp = build(hi);
    int grow = 0;
    while (worst(sp) > eps_target) {
        hi *= 2;
        sp = build(hi);
        if (++grow > 60) throw Error("cutoff search failed to converge");
    }
    Real lo = hi / 2;
    for (int i = 0; i < 12; ++i) {
        Real mid = (lo + hi) / 2;
        GradedSpectrum trial = build(mid);
        if (worst(trial) <= eps_target) {
            hi = mid;
            sp = std::move(trial);
        } else {
            lo = mid;
        }
    }
    return sp;
}
}  // namespace detail

// Per-block spectra for a geometry, each truncated so its certified tail at
// t_min is at most eps_tail/2.
inline std::vector<GradedSpectrum> block_spectra(const GeometrySpec& spec, ComplexKind kind,
                                                 const Real& t_min, const Real& eps_tail) {
    std::vector<GradedSpectrum> out;
    for (const auto& b : spec.blocks) {
        out.push_back(detail::solve_cutoff(
            [&](const Real& c) { return block_spectrum(b, kind, c); }, t_min, eps_tail / 2));
    }
    return out;
}

// Full (direct Minkowski) spectrum of the geometry at a common cutoff chosen
// so every grading's certified tail at t_min is at most eps_tail/2.  For two
// blocks the cutoff is solved on the composed certificates alone; the
// expensive Minkowski table is built once, at the accepted cutoff.
inline GradedSpectrum build_spectrum(const GeometrySpec& spec, ComplexKind kind, const Real& t_min,
                                     const Real& eps_tail) {
    const Real target = eps_tail / 2;
    if (spec.blocks.size() == 2) {
        auto probe = [&](const Real& c) {
            auto a = std::make_shared<const GradedSpectrum>(block_spectrum(spec.blocks[0], kind, c));
            auto b = std::make_shared<const GradedSpectrum>(block_spectrum(spec.blocks[1], kind, c));
            GradedSpectrum shell;
            shell.kind = kind;
            shell.m = a->m + b->m;
            shell.top = a->top + b->top;
            shell.cutoff = c;
            shell.lines.resize(shell.top + 1);
            shell.tails = detail::product_tails(a, b, c);
            return shell;
        };
        GradedSpectrum shell = detail::solve_cutoff(probe, t_min, target);
        return product_spectrum(block_spectrum(spec.blocks[0], kind, shell.cutoff),
                                block_spectrum(spec.blocks[1], kind, shell.cutoff));
    }
    auto build = [&](const Real& c) {
        GradedSpectrum acc = block_spectrum(spec.blocks[0], kind, c);
        for (size_t i = 1; i < spec.blocks.size(); ++i)
            acc = product_spectrum(acc, block_spectrum(spec.blocks[i], kind, c));
        return acc;
    };
    return detail::solve_cutoff(build, t_min, target);
}

// Fixed-cutoff variant (CLI use): no tail solving, certificates still valid
// for t >= t_min passed by the caller when evaluating.
inline GradedSpectrum build_spectrum_at_cutoff(const GeometrySpec& spec, ComplexKind kind,
                                               const Real& cutoff) {
    GradedSpectrum acc = block_spectrum(spec.blocks[0], kind, cutoff);
    for (size_t i = 1; i < spec.blocks.size(); ++i)
        acc = product_spectrum(acc, block_spectrum(spec.blocks[i], kind, cutoff));
    return acc;
}

}  // namespace heatlab
