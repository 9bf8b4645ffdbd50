#pragma once
// Small-t expansion extraction: weighted least squares in half-integer
// powers of t with guard orders and residual trimming, plus exact series
// oracles for the deformed circle and the Landau ladder on a torus.

#include "heatlab/exact.hpp"
#include "heatlab/real.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace heatlab {

struct FitOptions {
    int guards = 3;       // extra even orders fitted but never reported
    bool trim = true;     // drop rows the asymptotic model cannot explain
    int trim_rounds = 3;  // maximum trimming passes
    Real trim_factor{10}; // drop rows with |residual| > factor * median
};

struct FitResult {
    int m = 0;
    int n_max = 0;
    std::vector<int> orders;           // reported orders (even, 0..n_max)
    std::map<int, Real> coeff;         // A_n multiplying t^((n-m)/2)
    std::map<int, Real> uncertainty;   // 1-sigma from the residual spread
    int rows_total = 0;
    int rows_used = 0;
    int basis_size = 0;
    Real sigma{0};
    Real cond_proxy{0};
};

namespace detail {

// Cholesky solve / inverse for the tiny normal systems (K <= ~10).
struct Cholesky {
    int n;
    std::vector<Real> L;  // row-major lower triangle
    explicit Cholesky(const std::vector<Real>& G, int n_) : n(n_), L(n_ * n_, Real(0)) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                Real s = G[i * n + j];
                for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
                if (i == j) {
                    if (!(s > 0)) throw Error("fit_expansion: ill-conditioned design (normal matrix not positive definite)");
                    L[i * n + i] = sqrt(s);
                } else {
                    L[i * n + j] = s / L[j * n + j];
                }
            }
        }
    }
    std::vector<Real> solve(std::vector<Real> b) const {
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < i; ++k) b[i] -= L[i * n + k] * b[k];
            b[i] /= L[i * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int k = i + 1; k < n; ++k) b[i] -= L[k * n + i] * b[k];
            b[i] /= L[i * n + i];
        }
        return b;
    }
    Real inverse_diag(int k) const {  // ((L L^T)^{-1})_{kk}
        std::vector<Real> e(n, Real(0));
        e[k] = 1;
        e = solve(std::move(e));
        return e[k];
    }
    Real cond_proxy() const {
        Real lo = L[0], hi = L[0];
        for (int i = 0; i < n; ++i) {
            const Real& d = L[i * n + i];
            if (d < lo) lo = d;
            if (d > hi) hi = d;
        }
        return (hi / lo) * (hi / lo);
    }
};

}  // namespace detail

// Fit  value(t) ~ sum_n A_n t^((n-m)/2)  over even orders n = 0..n_max plus
// guard orders.  Rows are weighted by t^{-P} with P the first omitted half
// power, so the small-t samples carry the expansion; columns are scaled to
// unit max before forming the normal equations.
inline FitResult fit_expansion(const std::vector<std::pair<Real, Real>>& samples, int m, int n_max,
                               const FitOptions& opt = {}) {
    if (n_max < 0 || n_max % 2 != 0) throw Error("fit_expansion: n_max must be even and >= 0");
    std::vector<int> basis;
    for (int n = 0; n <= n_max + 2 * opt.guards; n += 2) basis.push_back(n);
    const int K = static_cast<int>(basis.size());
    const int rows = static_cast<int>(samples.size());
    if (rows < K + 2)
        throw Error("fit_expansion: insufficient samples (" + std::to_string(rows) + " rows for " +
                    std::to_string(K) + " basis orders; need rows >= basis + 2)");
    for (const auto& [t, v] : samples)
        if (!(t > 0)) throw Error("fit_expansion: sample t must be positive");

    const Real P = Real(basis.back() + 2 - m) / 2;
    std::vector<Real> M(static_cast<size_t>(rows) * K), rhs(rows), w(rows);
    for (int j = 0; j < rows; ++j) {
        const Real& t = samples[j].first;
        w[j] = pow(t, -P);
        rhs[j] = w[j] * samples[j].second;
        for (int k = 0; k < K; ++k) M[j * K + k] = w[j] * pow(t, Real(basis[k] - m) / 2);
    }
    std::vector<Real> colnorm(K, Real(0));
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < rows; ++j) {
            Real v = abs(M[j * K + k]);
            if (v > colnorm[k]) colnorm[k] = v;
        }
        if (!(colnorm[k] > 0)) throw Error("fit_expansion: degenerate basis column");
        for (int j = 0; j < rows; ++j) M[j * K + k] /= colnorm[k];
    }

    std::vector<char> active(rows, 1);
    std::vector<Real> beta, res(rows, Real(0));
    Real cond = 0;
    int used = rows;
    for (int round = 0;; ++round) {
        std::vector<Real> G(static_cast<size_t>(K) * K, Real(0)), g(K, Real(0));
        for (int j = 0; j < rows; ++j) {
            if (!active[j]) continue;
            for (int a = 0; a < K; ++a) {
                g[a] += M[j * K + a] * rhs[j];
                for (int b = 0; b <= a; ++b) G[a * K + b] += M[j * K + a] * M[j * K + b];
            }
        }
        for (int a = 0; a < K; ++a)
            for (int b = a + 1; b < K; ++b) G[a * K + b] = G[b * K + a];
        detail::Cholesky ch(G, K);
        cond = ch.cond_proxy();
        if (cond > Real("1e60"))
            throw Error("fit_expansion: ill-conditioned design (extend the ladder or lower n_max)");
        beta = ch.solve(g);
        for (int j = 0; j < rows; ++j) {
            if (!active[j]) { res[j] = 0; continue; }
            Real p = -rhs[j];
            for (int k = 0; k < K; ++k) p += M[j * K + k] * beta[k];
            res[j] = abs(p);
        }
        if (!opt.trim || round >= opt.trim_rounds) break;
        std::vector<Real> mags;
        for (int j = 0; j < rows; ++j)
            if (active[j]) mags.push_back(res[j]);
        std::sort(mags.begin(), mags.end());
        Real med = mags[mags.size() / 2];
        Real thresh = opt.trim_factor * med;
        if (thresh < Real("1e-45")) thresh = Real("1e-45");
        std::vector<int> keep, drop;
        for (int j = 0; j < rows; ++j) {
            if (!active[j]) continue;
            (res[j] > thresh ? drop : keep).push_back(j);
        }
        if (drop.empty()) break;
        const int min_rows = K + 3;
        if (static_cast<int>(keep.size()) < min_rows) {
            // keep the smallest-residual rows up to the floor
            std::vector<int> all = keep;
            all.insert(all.end(), drop.begin(), drop.end());
            std::sort(all.begin(), all.end(), [&](int a, int b) { return res[a] < res[b]; });
            keep.assign(all.begin(), all.begin() + std::min<size_t>(all.size(), min_rows));
            drop.clear();
        }
        std::fill(active.begin(), active.end(), 0);
        for (int j : keep) active[j] = 1;
        used = static_cast<int>(keep.size());
    }
    used = 0;
    for (int j = 0; j < rows; ++j) used += active[j];
    const int dof = used - K;
    if (dof < 1) throw Error("fit_expansion: no degrees of freedom left after trimming");
    Real ss = 0;
    for (int j = 0; j < rows; ++j)
        if (active[j]) ss += res[j] * res[j];
    Real sigma = sqrt(ss / dof);

    // one more normal matrix for the covariance of the final active set
    std::vector<Real> G(static_cast<size_t>(K) * K, Real(0));
    for (int j = 0; j < rows; ++j) {
        if (!active[j]) continue;
        for (int a = 0; a < K; ++a)
            for (int b = 0; b <= a; ++b) G[a * K + b] += M[j * K + a] * M[j * K + b];
    }
    for (int a = 0; a < K; ++a)
        for (int b = a + 1; b < K; ++b) G[a * K + b] = G[b * K + a];
    detail::Cholesky ch(G, K);

    FitResult out;
    out.m = m;
    out.n_max = n_max;
    out.rows_total = rows;
    out.rows_used = used;
    out.basis_size = K;
    out.sigma = sigma;
    out.cond_proxy = cond;
    for (int k = 0; k < K; ++k) {
        if (basis[k] > n_max) continue;  // guard orders stay internal
        out.orders.push_back(basis[k]);
        out.coeff[basis[k]] = beta[k] / colnorm[k];
        out.uncertainty[basis[k]] = sigma * sqrt(ch.inverse_diag(k)) / colnorm[k];
    }
    return out;
}

// Exact expansion of the derived trace of a single flat torus of area A with
// bundle degree d (Dolbeault).  The Landau ladder sums to -d/(e^{2Bt} - 1)
// exactly, so
//   A_0 = -A/(4 pi),  A_2 = d/2,
//   A_{4j} = -d B_{2j} (4d/A)^{2j-1} / (2j)! * pi^{2j-1}   (j >= 1),
// orders 6, 10, ... vanish, and every order beyond A_0 vanishes when d = 0.
inline std::map<int, PiHalfPoly> bernoulli_oracle(long d, const Rational& A, int n_max) {
    if (!(A > 0)) throw Error("bernoulli_oracle: area must be positive");
    std::map<int, PiHalfPoly> out;
    for (int n = 0; n <= n_max; n += 2) {
        if (n == 0) {
            out[0] = PiHalfPoly::term(-A / 4, -2);
        } else if (n == 2) {
            out[2] = PiHalfPoly(Rational(d, 2));
        } else {
            // 1/(e^x - 1) = 1/x - 1/2 + sum_j B_{2j} x^{2j-1}/(2j)! places the
            // B_{2j} term at t^{2j-1}, order n = 4j; orders 6, 10, ... vanish.
            if (d == 0 || n % 4 != 0) {
                out[n] = PiHalfPoly();
                continue;
            }
            int j = n / 4;
            Rational x = Rational(4 * d) / A;  // 2B / pi
            Rational xp = 1;
            for (int i = 0; i < 2 * j - 1; ++i) xp *= x;
            Integer fact = 1;
            for (int i = 2; i <= 2 * j; ++i) fact *= i;
            Rational c = -Rational(d) * bernoulli_even(2 * j) * xp / Rational(fact);
            out[n] = PiHalfPoly::term(c, 2 * (2 * j - 1));
        }
    }
    return out;
}

// Exact expansion of the grading-0 trace of the deformed circle:
//   Tr^0(t) = L (4 pi t)^{-1/2} exp(-a^2 t) up to exponentially small terms,
// so order n = 2k carries  L (-a^2)^k / (2 k!) * pi^(-1/2).  The circumference
// enters as an exact pi-polynomial (the default circle has L = 2 pi).
inline std::map<int, PiHalfPoly> circle_oracle(const PiHalfPoly& L, const Rational& a2, int n_max) {
    std::map<int, PiHalfPoly> out;
    Rational pw = 1;  // (-a^2)^k
    Integer fact = 1;
    for (int k = 0; 2 * k <= n_max; ++k) {
        if (k > 0) {
            pw *= -a2;
            fact *= k;
        }
        out[2 * k] = L * (pw / (2 * Rational(fact))) * PiHalfPoly::term(1, -1);
    }
    return out;
}

}  // namespace heatlab
