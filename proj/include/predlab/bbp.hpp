#pragma once

// Hexadecimal digit extraction for pi:
//
//   pi = sum_k 16^-k (4/(8k+1) - 2/(8k+4) - 1/(8k+5) - 1/(8k+6))
//
// The fractional part of 16^(n-1) * pi is accumulated in 128-bit unsigned
// fixed point (wrap-around is reduction mod 1). Head terms use exact modular
// exponentiation; each term is truncated once, so the accumulated error is
// bounded by a small multiple of n units of 2^-128. Digits whose value could
// flip within that bound are reported as PRECISION_RANGE rather than guessed.

#include <cstdint>
#include <string>

#include "predlab/error.hpp"

namespace predlab {

// Positions 1..kMaxHexDigitPosition are supported. The modulus 8k+6 stays
// below 2^30 there, so 64-bit products in the modular exponentiation never
// overflow.
inline constexpr std::uint64_t kMaxHexDigitPosition = 100'000'000;

namespace detail {

using u128 = unsigned __int128;

inline std::uint64_t pow16_mod(std::uint64_t exponent, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t result = 1;
  std::uint64_t base = 16 % m;
  while (exponent > 0) {
    if (exponent & 1U) result = result * base % m;
    base = base * base % m;
    exponent >>= 1;
  }
  return result;
}

// floor(2^128 * r / m) for r < m, i.e. r/m as a 128-bit fraction.
inline u128 fraction(std::uint64_t r, std::uint64_t m) {
  const u128 top = static_cast<u128>(r) << 64;
  const u128 hi = top / m;
  const u128 rem = top % m;
  const u128 lo = (rem << 64) / m;
  return (hi << 64) | lo;
}

// frac(16^d * sum_k 1/(16^k (8k+j))).
inline u128 series(std::uint64_t d, std::uint64_t j) {
  u128 sum = 0;
  for (std::uint64_t k = 0; k <= d; ++k) {
    const std::uint64_t m = 8 * k + j;
    sum += fraction(pow16_mod(d - k, m), m);
  }
  for (std::uint64_t k = d + 1;; ++k) {
    const std::uint64_t shift = 4 * (k - d);
    if (shift >= 128) break;
    const u128 term = fraction(1, 8 * k + j) >> shift;
    if (term == 0) break;
    sum += term;
  }
  return sum;
}

// Fractional part of 16^(n-1) * pi plus the absolute error bound in 2^-128 units.
struct PiFraction {
  u128 value;
  u128 error;
};

inline PiFraction pi_fraction(std::uint64_t n) {
  const std::uint64_t d = n - 1;
  const u128 s1 = series(d, 1);
  const u128 s4 = series(d, 4);
  const u128 s5 = series(d, 5);
  const u128 s6 = series(d, 6);
  // Per series: d + 1 head truncations below one unit each, at most 32 tail
  // terms below two units each. The combination weighs eight series.
  return {4 * s1 - 2 * s4 - s5 - s6, static_cast<u128>(8) * (d + 66)};
}

inline void check_position(std::uint64_t n) {
  if (n < 1 || n > kMaxHexDigitPosition) {
    fail(ErrorCode::kPrecisionRange,
         "hex digit position " + std::to_string(n) + " outside 1.." +
             std::to_string(kMaxHexDigitPosition));
  }
}

// Leading `count` hex digits of the fraction, or PRECISION_RANGE when the
// error interval straddles a digit boundary.
inline std::uint64_t leading_digits(const PiFraction& f, unsigned count, std::uint64_t n) {
  const unsigned shift = 128 - 4 * count;
  const u128 lo = f.value - f.error;
  const u128 hi = f.value + f.error;
  const bool wraps = lo > f.value || hi < f.value;
  if (wraps || (lo >> shift) != (hi >> shift)) {
    fail(ErrorCode::kPrecisionRange,
         "hex digits at position " + std::to_string(n) + " are not resolvable at 128-bit precision");
  }
  return static_cast<std::uint64_t>(f.value >> shift);
}

}  // namespace detail

// n-th hexadecimal digit (1-based) of the fractional part of pi: 2, 4, 3, F, ...
inline unsigned bbp_hex_digit(std::uint64_t n) {
  detail::check_position(n);
  return static_cast<unsigned>(detail::leading_digits(detail::pi_fraction(n), 1, n));
}

// Sixteen consecutive hex digits starting at position n, packed most
// significant digit first. One series evaluation serves all sixteen.
inline std::uint64_t bbp_hex_block(std::uint64_t n) {
  detail::check_position(n);
  return detail::leading_digits(detail::pi_fraction(n), 16, n);
}

}  // namespace predlab
