#pragma once
// Working scalar type, compensated summation, and shared error type.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/math/constants/constants.hpp>

#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace heatlab {

// All heat-trace numerics run in one fixed software float type.  50 decimal
// digits leaves ~25 digits of headroom over the tightest check tolerance.
using Real = boost::multiprecision::cpp_bin_float_50;

inline constexpr int real_digits10 = std::numeric_limits<Real>::digits10;

inline const Real& pi() {
    static const Real value = boost::math::constants::pi<Real>();
    return value;
}

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Neumaier variant of Kahan summation.  The trace evaluators feed terms in
// descending eigenvalue order (smallest terms first), and the carry keeps
// the rounding error of the running sum below one ulp of the result.
class StableSum {
  public:
    void add(const Real& term) {
        Real t = sum_ + term;
        if (abs(sum_) >= abs(term)) {
            carry_ += (sum_ - t) + term;
        } else {
            carry_ += (term - t) + sum_;
        }
        sum_ = t;
    }
    Real value() const { return sum_ + carry_; }
    void reset() { sum_ = 0; carry_ = 0; }

  private:
    Real sum_{0};
    Real carry_{0};
};

// Full-precision decimal rendering (round-trips through operator>>).
inline std::string to_full_string(const Real& x) {
    std::ostringstream os;
    os.precision(std::numeric_limits<Real>::max_digits10);
    os << x;
    return os.str();
}

// Shorter rendering for report decimals: enough digits to compare against
// every tolerance in the suite without drowning the reader.
inline std::string to_display_string(const Real& x, int digits = 30) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

}  // namespace heatlab
