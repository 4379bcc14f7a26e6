#include "fqz/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace fqz {

namespace {

Rational parse_decimal(std::string_view text) {
  std::string s(text);
  bool negative = false;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    negative = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long exponent = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      ++pos;
      long e = 0;
      auto first = s.data() + pos;
      auto last = s.data() + s.size();
      if (first != last && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, e);
      if (ec != std::errc() || ptr != last) throw std::invalid_argument("bad exponent in '" + s + "'");
      exponent += e;
      pos = s.size();
      break;
    } else {
      throw std::invalid_argument("not a number: '" + s + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("not a number: '" + s + "'");
  mpz_class numerator(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent < 0 ? Rational(numerator, scale) : Rational(numerator * scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty number");
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational q = num / den;
  q.canonicalize();
  return q;
}

Rational rational_from_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::invalid_argument("cannot format double");
  return parse_decimal(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

Rational pow(const Rational& base, int exponent) {
  if (exponent < 0) {
    if (base == 0) throw std::domain_error("0 to a negative power");
    return pow(Rational(1) / base, -exponent);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_str();
}

}  // namespace fqz
