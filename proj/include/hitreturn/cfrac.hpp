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

// Continued fractions for rotation numbers in (0, 1).
//
// Digits follow alpha = [a_0, a_1, ...] = 1/(a_0 + 1/(a_1 + ...)), so a_k is
// the integer part of 1/H^k(alpha) for the Gauss map H(x) = {1/x}.
// Convergents are indexed so that (p_0, q_0) = (1, 0), (p_1, q_1) = (0, 1)
// and q_{k+1} = a_{k-1} q_k + q_{k-1}; for the golden mean the q's are the
// Fibonacci numbers 0, 1, 1, 2, 3, 5, ...

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hitreturn/error.hpp"
#include "hitreturn/numeric.hpp"

namespace hitreturn {

// A number in [0, 1] as the continued-fraction machinery sees it: an exact
// rational, a rational interval known to contain it, or an explicit digit
// sequence (optionally repeated forever, which covers quadratic irrationals).
class Alpha {
 public:
  static Alpha exact(Rational value);
  static Alpha from_double(double value);  // the exact binary value
  static Alpha within(Rational lo, Rational hi);
  static Alpha from_digits(std::vector<std::uint64_t> digits, bool periodic);

  // Decimal literal (exact, e.g. "0.25") or `cf:[1,2,3]`; a trailing `*`
  // (`cf:[1,2]*` or `cf:[1,2*]`) repeats the whole list forever. `golden`
  // is cf:[1]*.
  static Alpha parse(std::string_view text);

  // The golden mean (sqrt(5) - 1) / 2 = [1, 1, 1, ...].
  static Alpha golden() { return from_digits({1}, true); }

  bool is_digit_list() const { return std::holds_alternative<Digits>(source_); }

  // floor(alpha * 2^128).
  unsigned __int128 fixed128() const;
  // Nearest 64-bit fixed-point fraction, the lattice used by rotations.
  std::uint64_t fixed64() const;
  long double approx() const;

  // Produces a_0, a_1, ... one at a time.
  class DigitStream {
   public:
    enum class Status { digit, rational_end, exhausted };

    Status next(std::uint64_t& digit);
    // True when the source is known to have no further digits.
    bool finished() const;
    // Exact H^k(alpha) interval after k digits; only for rational sources.
    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }

   private:
    friend class Alpha;
    const Alpha* owner_ = nullptr;
    std::size_t index_ = 0;
    Rational lo_;
    Rational hi_;
  };

  DigitStream digits() const;

 private:
  struct Interval {
    Rational lo;
    Rational hi;
  };
  struct Digits {
    std::vector<std::uint64_t> values;
    bool periodic;
  };

  explicit Alpha(Interval v) : source_(std::move(v)) {}
  explicit Alpha(Digits v) : source_(std::move(v)) {}

  std::variant<Interval, Digits> source_;
};

struct Convergent {
  std::uint64_t p;
  std::uint64_t q;
};

struct CFState {
  unsigned __int128 alpha_fixed = 0;  // floor(alpha * 2^128)
  long double alpha = 0;
  std::vector<std::uint64_t> digits;     // a_0 .. a_{m-1}, m <= order
  std::vector<Convergent> convergents;   // indices 0 .. m+1
  std::size_t order = 0;                 // digits requested
  // Set when H^m(alpha) = 0 for m < order: alpha is exactly p/q.
  std::optional<Convergent> rational;

  bool truncated() const { return digits.size() < order; }

  // |q_k alpha - p_k| in extended precision.
  long double error(std::size_t k) const;
  // Value of [a_k, a_{k+1}, ..., a_{m-1}] from the stored digits.
  long double tail_value(std::size_t k) const;
};

// H(0) = 0, H(x) = {1/x}.
double gauss_map(double x);
Rational gauss_map(const Rational& x);

// Digits a_0..a_{n-1} and convergents. Stops early and fills `rational` when
// the Gauss orbit reaches 0; throws PrecisionExhausted when an interval
// source can no longer certify the next digit.
CFState expand(const Alpha& alpha, std::size_t n);

struct NaturalExtensionPoint {
  double theta = 0;  // H^n(alpha)
  double omega = 0;  // [a_{n-1}, ..., a_0, b_0, b_1, ...]
  std::size_t order = 0;
};

// Gamma^n(alpha, beta). Throws RationalDetected if alpha terminates before n
// digits. The beta digits are consumed until the omega truncation error is
// below 2^-40 (or beta itself terminates).
NaturalExtensionPoint natural_extension(const Alpha& alpha, const Alpha& beta, std::size_t n);

// Closed arc {start -> end} on R/Z (counterclockwise), 64-bit fixed point.
struct CircleArc {
  std::uint64_t start = 0;
  std::uint64_t end = 0;

  bool wraps() const { return start > end; }
  std::uint64_t length_fixed() const { return end - start; }
  double length() const;
  double start_real() const;
  double end_real() const;
  bool contains(std::uint64_t x) const { return x - start <= end - start; }
};

// J_n: the closed arc with endpoints R^{q_{n-1}}(z) and R^{q_n}(z) that
// contains z, for the rotation R by alpha rounded to 64 bits. n >= 2; an
// arc that would cover the whole circle is rejected.
//
// Hitting times to J_n, scaled by its length, follow approximately the law
// cf_hitting_law(theta, omega) with (theta, omega) = natural_extension(alpha,
// beta, n - 1): theta is the ratio ||q_n alpha|| / ||q_{n-1} alpha|| and omega
// is close to q_{n-1} / q_n.
CircleArc renormalization_interval(const Alpha& alpha, double z, std::size_t n);
CircleArc renormalization_interval(const Alpha& alpha, std::uint64_t z, std::size_t n);

}  // namespace hitreturn
