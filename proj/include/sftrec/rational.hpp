#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace sftrec {

using Rational = mpq_class;

// "n/d" or "n"; throws std::invalid_argument on malformed input or zero denominator.
Rational parse_rational(std::string_view text);

// Canonical form: "n" for integers, "n/d" otherwise.
std::string to_string(const Rational& q);

inline Rational make_rational(long num, long den = 1)
{
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational factorial(unsigned n)
{
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return Rational(r);
}

} // namespace sftrec
