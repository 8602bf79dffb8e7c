#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stark::costmodel {

using Int = __int128;

std::string int_to_string(Int v);

/// Exact rational on 128-bit integers, always normalized with positive
/// denominator. Big enough for every cost expression at the sizes the model
/// is evaluated at (counts up to ~2^100 after clearing denominators).
class Rational {
 public:
  Rational() = default;
  Rational(Int v) : num_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(Int num, Int den) : num_(num), den_(den) { normalize(); }

  Int numerator() const { return num_; }
  Int denominator() const { return den_; }
  bool is_integer() const { return den_ == 1; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// "p" when integral, "p/q" otherwise.
  std::string str() const;

 private:
  void normalize();

  Int num_ = 0;
  Int den_ = 1;
};

}  // namespace stark::costmodel
