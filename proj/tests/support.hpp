#pragma once

#include <sftrec/sampling.hpp>

#include <random>
#include <vector>

namespace sftrec::testing {

using sftrec::mixed_table;
using sftrec::RandomSeries;

inline int parity_of(const GradedSeries& f)
{
    return f.parity().value_or(0);
}

inline Rational koszul(int a, int b)
{
    return ((a & b) & 1) ? Rational(-1) : Rational(1);
}

} // namespace sftrec::testing
