#ifndef HTV_RATIONAL_HPP
#define HTV_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace htv {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long n, long d = 1) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  return Rational(n, d);
}

inline Integer numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Integer int_pow(Integer base, unsigned exp) {
  Integer out = 1;
  while (exp) {
    if (exp & 1u) out *= base;
    base *= base;
    exp >>= 1u;
  }
  return out;
}

inline Rational rat_pow(const Rational& base, int exp) {
  if (exp == 0) return Rational(1);
  if (exp < 0) {
    if (base == 0) throw std::domain_error("zero to negative power");
    Rational inv = Rational(1) / base;
    return rat_pow(inv, -exp);
  }
  Rational out = 1;
  Rational b = base;
  unsigned e = static_cast<unsigned>(exp);
  while (e) {
    if (e & 1u) out *= b;
    b *= b;
    e >>= 1u;
  }
  return out;
}

inline Integer factorial(unsigned n) {
  Integer out = 1;
  for (unsigned i = 2; i <= n; ++i) out *= i;
  return out;
}

// x(x-1)...(x-k+1) for any rational x
inline Rational falling_power(const Rational& x, unsigned k) {
  Rational out = 1;
  for (unsigned i = 0; i < k; ++i) out *= (x - Rational(i));
  return out;
}

// binomial C(n, k) for integer n (possibly negative), k >= 0
inline Rational binomial(long n, unsigned k) {
  Rational out = falling_power(Rational(n), k);
  return out / Rational(factorial(k));
}

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace htv

#endif
