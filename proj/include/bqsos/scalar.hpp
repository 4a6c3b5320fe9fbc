#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "bqsos/errors.hpp"

namespace bqsos {

/// Exact scalar backend. Conversion to/from double is always explicit;
/// a double converts exactly (it is a dyadic rational).
using Rational = boost::multiprecision::cpp_rational;

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool is_exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double abs(double v) { return std::abs(v); }
    static double to_double(double v) { return v; }
    static double from_double(double v) { return v; }
    static std::string to_string(double v) { return std::to_string(v); }
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool is_exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
    static double to_double(const Rational& v) { return v.convert_to<double>(); }
    static Rational from_double(double v) {
        if (!std::isfinite(v)) throw InvalidInput("non-finite value cannot be converted to rational");
        return Rational(v);
    }
    static std::string to_string(const Rational& v) { return v.str(); }
};

/// Exact square root of a nonnegative rational, defined only when both
/// numerator and denominator are perfect squares.
inline std::optional<Rational> rational_sqrt(const Rational& v) {
    using boost::multiprecision::cpp_int;
    if (v < 0) return std::nullopt;
    const cpp_int num = numerator(v);
    const cpp_int den = denominator(v);
    const cpp_int rn = sqrt(num);
    const cpp_int rd = sqrt(den);
    if (rn * rn != num || rd * rd != den) return std::nullopt;
    return Rational(rn, rd);
}

/// Parses "p/q", plain integers, and decimal strings ("1.25") exactly.
inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        return Rational(boost::multiprecision::cpp_int(s.substr(0, slash)),
                        boost::multiprecision::cpp_int(s.substr(slash + 1)));
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    boost::multiprecision::cpp_int den = 1;
    for (size_t i = 0; i < s.size() - dot - 1; ++i) den *= 10;
    return Rational(boost::multiprecision::cpp_int(digits), den);
}

}  // namespace bqsos
