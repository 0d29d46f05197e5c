#include "windtree/rational.hpp"

#include <stdexcept>

namespace windtree {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// GMP reads a leading 0 as an octal prefix.
BigInt decimal(std::string_view digits) {
  while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
  return BigInt{std::string(digits)};
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("invalid number '" + std::string(whole) + "'");
  BigInt v = decimal(s);
  return negative ? BigInt(-v) : v;
}

BigInt pow10(long e) {
  BigInt r = 1;
  for (long k = 0; k < e; ++k) r *= 10;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty number");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0)
      throw std::invalid_argument("invalid fraction '" + std::string(text) + "' (zero denominator)");
    return Rational(num, den);
  }

  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    BigInt ev = parse_integer(text.substr(e + 1), text);
    if (abs(ev) > 4000) throw std::invalid_argument("exponent out of range in '" + std::string(text) + "'");
    exponent = ev.convert_to<long>();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mantissa.substr(0, dot);
    std::string_view fp = mantissa.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw std::invalid_argument("invalid number '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!all_digits(mantissa)) throw std::invalid_argument("invalid number '" + std::string(text) + "'");
    digits = std::string(mantissa);
  }
  BigInt num = decimal(digits);
  if (negative) num = -num;
  long shift = exponent - frac_digits;
  if (shift >= 0) return Rational(BigInt(num * pow10(shift)));
  return Rational(num, pow10(-shift));
}

std::string to_string(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::int64_t floor_int(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  BigInt quot = num / den;  // truncates toward zero
  if (num < 0 && quot * den != num) quot -= 1;
  return quot.convert_to<std::int64_t>();
}

std::int64_t ceil_int(const Rational& q) { return -floor_int(Rational(-q)); }

}  // namespace windtree
