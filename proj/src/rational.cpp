#include "halflab/rational.hpp"

#include <cctype>

#include "halflab/errors.hpp"

namespace halflab {

std::string format_rational(const Rat& value) {
  return numerator(value).str() + "/" + denominator(value).str();
}

namespace {

Int parse_integer(const std::string& text) {
  if (text.empty()) throw parse_error("empty integer literal");
  std::size_t start = text[0] == '-' ? 1 : 0;
  if (start == text.size()) throw parse_error("sign without digits: '" + text + "'");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw parse_error("bad integer literal: '" + text + "'");
    }
  }
  return Int(text);
}

}  // namespace

Rat parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rat(parse_integer(text));
  const Int num = parse_integer(text.substr(0, slash));
  const Int den = parse_integer(text.substr(slash + 1));
  if (den == 0) throw parse_error("zero denominator: '" + text + "'");
  return Rat(num, den);
}

Rat ratio_of(const Int& num, const Int& den) {
  if (den <= 0) throw precondition_error("ratio_of requires a positive denominator");
  return Rat(num, den);
}

Rat pow2_inverse(std::size_t k) {
  Int den = Int(1) << k;
  return Rat(Int(1), den);
}

Int floor_rat(const Rat& value) {
  Int q = numerator(value) / denominator(value);
  if (numerator(value) < 0 && q * denominator(value) != numerator(value)) q -= 1;
  return q;
}

Int ceil_rat(const Rat& value) {
  Int q = numerator(value) / denominator(value);
  if (numerator(value) > 0 && q * denominator(value) != numerator(value)) q += 1;
  return q;
}

}  // namespace halflab
