#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace ctg {

/// Exact rational scalar used for all polynomial identities. Converted to
/// double only at the numerical boundary.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

inline Rational rational(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace ctg
