#pragma once
// Exact arithmetic: rationals, dyadic capture of parsed reals, and the
// small symbolic ring Q[pi^(1/2), pi^(-1/2)] used for predicted values.

#include "heatlab/real.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

namespace heatlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Exact conversion: every finite Real is a dyadic rational.
inline Rational to_rational(const Real& x) {
    if (x == 0) return Rational(0);
    if (!boost::math::isfinite(x)) throw Error("to_rational: non-finite value");
    int e = 0;
    Real m = frexp(x, &e);  // x = m * 2^e with 1/2 <= |m| < 1
    constexpr int bits = std::numeric_limits<Real>::digits;
    Real scaled = ldexp(m, bits);  // integral by construction
    Integer n = scaled.convert_to<Integer>();
    Rational r(n);
    int shift = e - bits;
    if (shift >= 0) {
        r *= Rational(Integer(1) << shift);
    } else {
        r /= Rational(Integer(1) << (-shift));
    }
    return r;
}

inline Real to_real(const Rational& q) {
    return Real(numerator(q)) / Real(denominator(q));
}

inline std::string rational_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

// Exact values in this project are finite sums  sum_k  c_k * pi^(k/2)
// with rational c_k (half powers come from odd-dimensional blocks).
// Keys store k, i.e. twice the pi-exponent.
class PiHalfPoly {
  public:
    PiHalfPoly() = default;
    /*implicit*/ PiHalfPoly(const Rational& c) {
        if (c != 0) terms_[0] = c;
    }
    /*implicit*/ PiHalfPoly(long n) : PiHalfPoly(Rational(n)) {}

    static PiHalfPoly term(const Rational& coeff, int half_power) {
        PiHalfPoly p;
        if (coeff != 0) p.terms_[half_power] = coeff;
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    const std::map<int, Rational>& terms() const { return terms_; }

    PiHalfPoly& operator+=(const PiHalfPoly& o) {
        for (const auto& [k, c] : o.terms_) {
            Rational& slot = terms_[k];
            slot += c;
            if (slot == 0) terms_.erase(k);
        }
        return *this;
    }
    PiHalfPoly& operator-=(const PiHalfPoly& o) { return *this += o * Rational(-1); }

    PiHalfPoly operator+(const PiHalfPoly& o) const {
        PiHalfPoly r = *this;
        r += o;
        return r;
    }
    PiHalfPoly operator-(const PiHalfPoly& o) const {
        PiHalfPoly r = *this;
        r -= o;
        return r;
    }
    PiHalfPoly operator*(const PiHalfPoly& o) const {
        PiHalfPoly r;
        for (const auto& [ka, ca] : terms_) {
            for (const auto& [kb, cb] : o.terms_) {
                Rational& slot = r.terms_[ka + kb];
                slot += ca * cb;
                if (slot == 0) r.terms_.erase(ka + kb);
            }
        }
        return r;
    }
    PiHalfPoly operator*(const Rational& c) const {
        PiHalfPoly r;
        if (c == 0) return r;
        for (const auto& [k, v] : terms_) r.terms_[k] = v * c;
        return r;
    }

    bool operator==(const PiHalfPoly& o) const { return terms_ == o.terms_; }

    Real eval() const {
        const Real sqrt_pi = sqrt(pi());
        Real acc = 0;
        for (const auto& [k, c] : terms_) {
            Real p = 1;
            int a = std::abs(k);
            for (int i = 0; i < a; ++i) p *= sqrt_pi;
            if (k < 0) p = Real(1) / p;
            acc += to_real(c) * p;
        }
        return acc;
    }

    // Canonical rendering, e.g. "2/3", "-1/2*pi^(-1)", "1/2*pi^(-1/2) + 3".
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        // Highest power first reads like a polynomial.
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            Rational c = it->second;
            bool neg = c < 0;
            if (neg) c = -c;
            if (first) {
                if (neg) out += "-";
            } else {
                out += neg ? " - " : " + ";
            }
            out += rational_string(c);
            out += pi_suffix(it->first);
            first = false;
        }
        return out;
    }

  private:
    static std::string pi_suffix(int k) {
        if (k == 0) return "";
        if (k == 2) return "*pi";
        if (k == 1) return "*pi^(1/2)";
        if (k == -1) return "*pi^(-1/2)";
        if (k % 2 == 0) return "*pi^(" + std::to_string(k / 2) + ")";
        return "*pi^(" + std::to_string(k) + "/2)";
    }

    std::map<int, Rational> terms_;
};

inline PiHalfPoly operator*(const Rational& c, const PiHalfPoly& p) { return p * c; }

// Bernoulli numbers B_0, B_2, B_4, ... (B_1 convention irrelevant here),
// by the Akiyama-Tanigawa triangle in exact arithmetic.
inline Rational bernoulli_even(int two_k) {
    if (two_k < 0 || two_k % 2 != 0) throw Error("bernoulli_even: index must be even and >= 0");
    static std::vector<Rational> cache;  // cache[j] = B_{2j}
    int j = two_k / 2;
    if (j < static_cast<int>(cache.size())) return cache[j];
    int n_max = two_k;
    std::vector<Rational> a(n_max + 1);
    std::vector<Rational> b(n_max + 1);  // b[n] = B_n, B_1 = +1/2 variant
    for (int m = 0; m <= n_max; ++m) {
        a[m] = Rational(1, m + 1);
        for (int i = m; i >= 1; --i) a[i - 1] = Rational(i) * (a[i - 1] - a[i]);
        b[m] = a[0];
    }
    cache.clear();
    for (int i = 0; i * 2 <= n_max; ++i) cache.push_back(b[2 * i]);
    return cache[j];
}

}  // namespace heatlab
