#pragma once

#include <cmath>
#include <cstdint>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace divlab {

// Working precision for coefficient-level arithmetic: 100 decimal digits,
// roughly 40 digits of headroom over the strongest output guarantee.
using Real = boost::multiprecision::cpp_bin_float_100;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Real pi_real() { return boost::math::constants::pi<Real>(); }

inline Real to_real(const Rational& q) { return q.convert_to<Real>(); }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const Real& x) { return x.convert_to<double>(); }

// Neumaier compensated summation; deterministic for a fixed add order.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    void add(const CompensatedSum& other) {
        add(other.sum);
        add(other.comp);
    }

    double value() const { return sum + comp; }
};

} // namespace divlab
