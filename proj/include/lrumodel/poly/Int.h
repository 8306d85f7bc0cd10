// SPDX-License-Identifier: Apache-2.0
//
// Integer helpers shared by the polyhedral library. Constraint coefficients
// are 64-bit and every operation on them is overflow checked; counts and
// quasi-polynomial coefficients use GMP arbitrary precision values.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lrumodel::poly {

using Int = int64_t;
using BigInt = mpz_class;
using Rational = mpq_class;

/// Thrown when a 64-bit coefficient computation would overflow.
class OverflowError : public std::overflow_error {
public:
  OverflowError() : std::overflow_error("integer coefficient overflow") {}
};

/// Operands live in different spaces (same tuple name, different arity, or
/// mismatched composition).
class IncompatibleSpaceError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A set that must be bounded (for counting or enumeration) is not.
class UnboundedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline Int checkedAdd(Int A, Int B) {
  Int R;
  if (__builtin_add_overflow(A, B, &R))
    throw OverflowError();
  return R;
}

inline Int checkedSub(Int A, Int B) {
  Int R;
  if (__builtin_sub_overflow(A, B, &R))
    throw OverflowError();
  return R;
}

inline Int checkedMul(Int A, Int B) {
  Int R;
  if (__builtin_mul_overflow(A, B, &R))
    throw OverflowError();
  return R;
}

inline Int checkedNeg(Int A) { return checkedSub(0, A); }

/// A * B + C without intermediate overflow.
inline Int checkedMulAdd(Int A, Int B, Int C) {
  return checkedAdd(checkedMul(A, B), C);
}

/// Floor division for a positive divisor.
inline Int floorDiv(Int A, Int D) {
  Int Q = A / D;
  if ((A % D != 0) && ((A < 0) != (D < 0)))
    --Q;
  return Q;
}

inline Int ceilDiv(Int A, Int D) { return -floorDiv(-A, D); }

/// Non-negative remainder for a positive divisor.
inline Int floorMod(Int A, Int D) { return A - floorDiv(A, D) * D; }

inline Int gcd(Int A, Int B) { return std::gcd(A, B); }

inline Int lcm(Int A, Int B) {
  if (A == 0 || B == 0)
    return 0;
  Int G = std::gcd(A, B);
  return checkedMul(A / G < 0 ? -(A / G) : A / G, B < 0 ? -B : B);
}

inline BigInt toBig(Int V) { return BigInt(static_cast<long>(V)); }

/// Converts an integral rational into a 64-bit value; throws if it does not
/// fit or is not integral.
inline Int toInt(const Rational &V) {
  if (V.get_den() != 1)
    throw std::domain_error("value " + V.get_str() + " is not an integer");
  if (!V.get_num().fits_slong_p())
    throw OverflowError();
  return V.get_num().get_si();
}

inline Int toInt(const BigInt &V) {
  if (!V.fits_slong_p())
    throw OverflowError();
  return V.get_si();
}

} // namespace lrumodel::poly
