#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <cstdint>
#include <string>

namespace st {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// 100 decimal digits (~332 bits): shared high-precision real/complex scalar.
using HPReal    = boost::multiprecision::cpp_bin_float_100;
using HPComplex = boost::multiprecision::cpp_complex_100;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline double to_double(const HPReal& x) { return x.convert_to<double>(); }

// floor of a rational as an exact integer
inline Int rat_floor(const Rat& r) {
    Int n = rat_num(r), d = rat_den(r); // d > 0 canonical
    Int q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

// fractional part in [0,1)
inline Rat rat_frac(const Rat& r) { return r - Rat(rat_floor(r)); }

// integer square root: largest s with s*s <= n (n >= 0)
inline Int isqrt(const Int& n) {
    if (n < 0) throw std::domain_error("isqrt of negative");
    if (n == 0) return 0;
    Int x = Int(1) << (unsigned)((boost::multiprecision::msb(n) / 2) + 1);
    for (;;) {
        Int y = (x + n / x) / 2;
        if (y >= x) break;
        x = y;
    }
    while (x * x > n) --x;
    while ((x + 1) * (x + 1) <= n) ++x;
    return x;
}

inline bool is_perfect_square(const Int& n) {
    if (n < 0) return false;
    Int s = isqrt(n);
    return s * s == n;
}

inline std::string rat_string(const Rat& r) {
    std::string s = rat_num(r).str();
    s += "/";
    s += rat_den(r).str();
    return s;
}

} // namespace st
