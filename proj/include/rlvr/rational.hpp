#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rlvr {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses an optionally signed decimal literal ("12", "-0.50", ".5", "3.") into an
// exact rational. Returns nullopt for anything else, including exponents.
std::optional<Rational> parse_decimal(std::string_view text);

// Parses a decimal literal or a simple fraction "a/b" of two decimal literals.
// A zero denominator yields nullopt.
std::optional<Rational> parse_rational_literal(std::string_view text);

// Renders a rational as a terminating decimal when the reduced denominator has
// only factors 2 and 5 ("150", "0.015"); otherwise as "p/q".
std::string to_decimal_string(const Rational& value);

double to_double(const Rational& value);

}  // namespace rlvr
