// Copyright 2026 The hitreturn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Points of the circle R/Z as unsigned 64-bit fixed-point fractions k/2^64.
// Addition mod 1 is plain wrapping integer addition.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "hitreturn/numeric.hpp"

namespace hitreturn {

inline constexpr double kTwoPow64 = 18446744073709551616.0;

// floor(x * 2^64) for x in [0, 1); values outside are reduced mod 1 first.
inline std::uint64_t fixed_from_real(double x) {
  double frac = x - std::floor(x);
  const double scaled = std::ldexp(frac, 64);
  if (scaled >= kTwoPow64) return 0;  // frac rounded up to 1.0
  return static_cast<std::uint64_t>(scaled);
}

inline double real_from_fixed(std::uint64_t v) { return std::ldexp(static_cast<double>(v), -64); }

inline long double real_from_fixed128(unsigned __int128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  return std::ldexp(static_cast<long double>(hi), -64) + std::ldexp(static_cast<long double>(lo), -128);
}

// floor(r * 2^128) for r in [0, 1).
inline unsigned __int128 fixed128_from_rational(const Rational& r) {
  const BigInt scaled = BigInt(boost::multiprecision::numerator(r) << 128) /
                        boost::multiprecision::denominator(r);
  const auto lo = static_cast<std::uint64_t>(scaled & BigInt(UINT64_MAX));
  const auto hi = static_cast<std::uint64_t>((scaled >> 64) & BigInt(UINT64_MAX));
  return (static_cast<unsigned __int128>(hi) << 64) | lo;
}

// Nearest 64-bit fraction to a 128-bit one.
inline std::uint64_t round_to_fixed64(unsigned __int128 v) {
  const unsigned __int128 half = static_cast<unsigned __int128>(1) << 63;
  if (v > ~static_cast<unsigned __int128>(0) - half) return UINT64_MAX;
  return static_cast<std::uint64_t>((v + half) >> 64);
}

inline std::string format_hex(std::uint64_t v) {
  char buffer[24];
  std::snprintf(buffer, sizeof buffer, "0x%016llx", static_cast<unsigned long long>(v));
  return buffer;
}

}  // namespace hitreturn
