#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace parkcrit {

using Rational = mpq_class;

/// Parses "27/28", "-3", "0.125" or "2.5e-3" into an exact rational.
/// Decimal notation is read exactly, so "0.1" is 1/10 rather than the
/// nearest double.
Rational parse_rational(std::string_view text);

/// Always "num/den", also for integers ("3/1").
std::string to_string(const Rational& value);

} // namespace parkcrit
