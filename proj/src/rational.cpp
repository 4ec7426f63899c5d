#include "cowalk/rational.hpp"

#include <cctype>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace cowalk {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  if (!is_integer_literal(s)) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  std::string digits(s[0] == '+' ? s.substr(1) : s);
  return mpz_class(digits, 10);
}

nlohmann::json integer_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return static_cast<std::int64_t>(z.get_si());
  return z.get_str();
}

mpz_class integer_from_json(const nlohmann::json& node) {
  if (node.is_number_integer()) return mpz_class(std::to_string(node.get<std::int64_t>()), 10);
  if (node.is_string()) return parse_integer(node.get<std::string>());
  throw std::invalid_argument("rational component must be an integer, got " + node.dump());
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");

  Rational out;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(text.substr(0, slash));
    mpz_class den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    out = Rational(num, den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole = "0";
    if (frac.empty() || !is_integer_literal(frac) || frac[0] == '-' || frac[0] == '+') {
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    }
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class w = parse_integer(whole);
    if (w < 0) w = -w;
    mpz_class num = w * scale + parse_integer(frac);
    out = Rational(negative ? mpz_class(-num) : num, scale);
  } else {
    out = Rational(parse_integer(text));
  }
  out.canonicalize();
  return out;
}

std::string to_string(const Rational& value) { return value.get_str(); }

nlohmann::json rational_to_json(const Rational& value) {
  return nlohmann::json{{"num", integer_to_json(value.get_num())},
                        {"den", integer_to_json(value.get_den())}};
}

Rational rational_from_json(const nlohmann::json& node) {
  if (node.is_object()) {
    if (!node.contains("num") || !node.contains("den")) {
      throw std::invalid_argument("rational object needs num and den: " + node.dump());
    }
    mpz_class den = integer_from_json(node.at("den"));
    if (den == 0) throw std::invalid_argument("zero denominator: " + node.dump());
    Rational r(integer_from_json(node.at("num")), den);
    r.canonicalize();
    return r;
  }
  if (node.is_string()) return parse_rational(node.get<std::string>());
  if (node.is_number_integer()) return Rational(integer_from_json(node));
  throw std::invalid_argument("expected an exact rational, got " + node.dump());
}

}  // namespace cowalk
