#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qet {

using Int = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) {
    return q.get_str();
}

// Accepts "p" or "p/q" with an optional leading sign.
inline Rational parse_rational(const std::string& text) {
    Rational q;
    if (q.set_str(text, 10) != 0)
        throw std::invalid_argument("malformed rational: '" + text + "'");
    q.canonicalize();
    if (q.get_den() <= 0)
        throw std::invalid_argument("malformed rational: '" + text + "'");
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace qet
