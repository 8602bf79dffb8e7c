#include "stark/rational.hpp"

namespace stark::costmodel {

std::string int_to_string(Int v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  // careful at INT128_MIN; the model never reaches it, keep it simple
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  std::string digits;
  while (u > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) digits.push_back('-');
  return {digits.rbegin(), digits.rend()};
}

namespace {
Int gcd128(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}
}  // namespace

void Rational::normalize() {
  if (den_ == 0) throw std::domain_error("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  const Int g = gcd128(num_, den_);
  num_ /= g;
  den_ /= g;
}

std::string Rational::str() const {
  if (den_ == 1) return int_to_string(num_);
  return int_to_string(num_) + "/" + int_to_string(den_);
}

}  // namespace stark::costmodel
