#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace aloha {

using BigInt = boost::multiprecision::cpp_int;

/// Reduced arbitrary-precision fraction, denominator kept positive.
struct Rational {
  BigInt num = 0;
  BigInt den = 1;

  Rational() = default;
  Rational(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) { reduce(); }

  void reduce() {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }

  double to_double() const {
    return num.convert_to<double>() / den.convert_to<double>();
  }

  std::string str() const { return num.str() + "/" + den.str(); }
};

inline BigInt factorial_big(int k) {
  BigInt f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace aloha
