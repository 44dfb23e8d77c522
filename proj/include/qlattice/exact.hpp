#pragma once

// Exact arithmetic and scalar-generic helpers shared by the closed forms.
//
// Every closed form in the library is templated on a Scalar. Two scalars are
// exercised: double for simulation-side work and Rational for zero-tolerance
// certification against exhaustive enumeration.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>

#include "qlattice/errors.hpp"

namespace qlattice {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

template <class Scalar>
inline constexpr bool is_exact_v = !std::is_floating_point_v<Scalar>;

/// Exact binomial coefficient C(n, k); zero outside 0 <= k <= n.
inline BigInt binomial_exact(long n, long k) {
  if (n < 0 || k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (long i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

template <class Scalar>
Scalar from_bigint(const BigInt& v) {
  if constexpr (is_exact_v<Scalar>) {
    return Scalar(v);
  } else {
    return v.template convert_to<Scalar>();
  }
}

/// Binomial coefficient as a Scalar. Exact integers up to n = 1000 (the
/// largest 2*tau with tau <= 500 still fits a double); log-gamma beyond.
template <class Scalar>
Scalar binomial(long n, long k) {
  if (n < 0 || k < 0 || k > n) return Scalar(0);
  if constexpr (!is_exact_v<Scalar>) {
    if (n > 1000) {
      using std::exp;
      using std::lgamma;
      return exp(lgamma(Scalar(n + 1)) - lgamma(Scalar(k + 1)) - lgamma(Scalar(n - k + 1)));
    }
  }
  return from_bigint<Scalar>(binomial_exact(n, k));
}

/// x^n by repeated squaring; works for any ring-like Scalar.
template <class Scalar>
Scalar ipow(Scalar x, long n) {
  if (n < 0) return Scalar(1) / ipow(x, -n);
  Scalar r(1);
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

template <class Scalar>
Scalar abs_value(const Scalar& x) {
  return x < Scalar(0) ? Scalar(-x) : x;
}

/// Parses "n/d" or a decimal literal into an exact rational.
Rational parse_rational(const std::string& text);

}  // namespace qlattice
