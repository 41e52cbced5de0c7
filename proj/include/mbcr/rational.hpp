#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace mbcr {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational with arbitrary-precision integers, kept in canonical form
/// (positive denominator, reduced) by the backend.
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1)
        return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Parses "num" or "num/den"; rejects zero denominators.
inline Rational parse_rational(const std::string& text) {
    try {
        Rational r(text);
        return r;
    } catch (const std::exception&) {
        throw parameter_error("not a rational number: '" + text + "'");
    }
}

} // namespace mbcr
