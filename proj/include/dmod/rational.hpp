#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace dmod {

using Rational = mpq_class;

// "p" or "p/q", canonical.
std::string to_string(const Rational& r);

// Accepts "p", "p/q" and finite decimals such as "1.25".
Rational parse_rational(std::string_view text);

}  // namespace dmod
