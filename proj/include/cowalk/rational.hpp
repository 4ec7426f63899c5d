#pragma once

#include <string>
#include <string_view>

#include <gmpxx.h>

#include "json.hpp"

namespace cowalk {

/// Exact rational used for every probability the oracle touches.
using Rational = mpq_class;

/// Parses "a/b", an integer, or a finite decimal such as "0.7" into an exact
/// canonical rational. Throws std::invalid_argument on malformed input or a
/// zero denominator.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& value);

/// {"num": a, "den": b}. Components that do not fit in int64 are emitted as
/// decimal strings.
nlohmann::json rational_to_json(const Rational& value);

/// Accepts the object form above, a "a/b" string, or an integer.
Rational rational_from_json(const nlohmann::json& node);

}  // namespace cowalk
