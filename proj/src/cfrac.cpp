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

#include "hitreturn/cfrac.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "hitreturn/fixed_point.hpp"

namespace hitreturn {

namespace {

BigInt floor_of(const Rational& r) {
  return BigInt(boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_plain_decimal(std::string_view s) {
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) return false;
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
    } else {
      return false;
    }
  }
  return seen_digit;
}

Rational parse_decimal(std::string_view s) {
  BigInt numerator = 0;
  BigInt denominator = 1;
  bool after_dot = false;
  for (char c : s) {
    if (c == '.') {
      after_dot = true;
      continue;
    }
    numerator = numerator * 10 + (c - '0');
    if (after_dot) denominator *= 10;
  }
  return Rational(numerator, denominator);
}

// Continued-fraction accumulator for [d_0, d_1, ...] = 1/(d_0 + 1/(d_1 + ...)).
struct Accumulator {
  BigInt h_prev{1}, h{0};
  BigInt k_prev{0}, k{1};

  void push(std::uint64_t d) {
    BigInt h_next = BigInt(d) * h + h_prev;
    BigInt k_next = BigInt(d) * k + k_prev;
    h_prev = std::move(h);
    h = std::move(h_next);
    k_prev = std::move(k);
    k = std::move(k_next);
  }
  Rational value() const { return Rational(h, k); }
  Rational previous() const { return k_prev == 0 ? Rational(1) : Rational(h_prev, k_prev); }
};

bool checked_step(std::uint64_t d, std::uint64_t x1, std::uint64_t x0, std::uint64_t& out) {
  std::uint64_t prod = 0;
  return !__builtin_mul_overflow(d, x1, &prod) && !__builtin_add_overflow(prod, x0, &out);
}

}  // namespace

// --- Alpha -----------------------------------------------------------------

Alpha Alpha::exact(Rational value) {
  if (value < 0 || value > 1) throw Error(ErrorKind::invalid_argument, "alpha must lie in [0, 1]");
  return Alpha(Interval{value, value});
}

Alpha Alpha::from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::invalid_argument, "alpha must be finite");
  return exact(Rational(value));
}

Alpha Alpha::within(Rational lo, Rational hi) {
  if (lo > hi || lo < 0 || hi > 1) {
    throw Error(ErrorKind::invalid_argument, "alpha interval must satisfy 0 <= lo <= hi <= 1");
  }
  return Alpha(Interval{std::move(lo), std::move(hi)});
}

Alpha Alpha::from_digits(std::vector<std::uint64_t> digits, bool periodic) {
  for (auto d : digits) {
    if (d == 0) throw Error(ErrorKind::invalid_argument, "continued-fraction digits must be positive");
  }
  if (periodic && digits.empty()) {
    throw Error(ErrorKind::invalid_argument, "a periodic digit list cannot be empty");
  }
  return Alpha(Digits{std::move(digits), periodic});
}

Alpha Alpha::parse(std::string_view text) {
  text = trim(text);
  if (text == "golden") return golden();
  if (text.substr(0, 3) == "cf:") {
    std::string_view body = trim(text.substr(3));
    bool periodic = false;
    if (!body.empty() && body.back() == '*') {
      periodic = true;
      body.remove_suffix(1);
    }
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
      throw ParseError("digit list must look like cf:[1,2,3] or cf:[1,2]*: '" + std::string(text) + "'");
    }
    body = body.substr(1, body.size() - 2);
    if (!body.empty() && body.back() == '*') {
      periodic = true;
      body.remove_suffix(1);
    }
    std::vector<std::uint64_t> digits;
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      std::uint64_t d = 0;
      const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), d);
      if (ec != std::errc() || end != item.data() + item.size() || item.empty() || d == 0) {
        throw ParseError("bad continued-fraction digit '" + std::string(item) + "'");
      }
      digits.push_back(d);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    if (digits.empty()) throw ParseError("empty digit list");
    return from_digits(std::move(digits), periodic);
  }

  Rational value;
  if (is_plain_decimal(text)) {
    value = parse_decimal(text);
  } else {
    double d = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(d)) {
      throw ParseError("not a number or digit list: '" + std::string(text) + "'");
    }
    value = Rational(d);
  }
  if (value < 0 || value > 1) throw ParseError("value must lie in [0, 1]: '" + std::string(text) + "'");
  return exact(value);
}

Alpha::DigitStream Alpha::digits() const {
  DigitStream s;
  s.owner_ = this;
  if (const auto* iv = std::get_if<Interval>(&source_)) {
    s.lo_ = iv->lo;
    s.hi_ = iv->hi;
  }
  return s;
}

bool Alpha::DigitStream::finished() const {
  if (const auto* ds = std::get_if<Digits>(&owner_->source_)) {
    return !ds->periodic && index_ >= ds->values.size();
  }
  return hi_ == 0;
}

Alpha::DigitStream::Status Alpha::DigitStream::next(std::uint64_t& digit) {
  if (const auto* ds = std::get_if<Digits>(&owner_->source_)) {
    if (index_ < ds->values.size()) {
      digit = ds->values[index_++];
      return Status::digit;
    }
    if (!ds->periodic) return Status::rational_end;
    digit = ds->values[index_++ % ds->values.size()];
    return Status::digit;
  }

  if (hi_ == 0) return Status::rational_end;
  if (lo_ == 0) return Status::exhausted;
  // H reverses order on each branch: 1/[lo, hi] = [1/hi, 1/lo].
  const Rational a = 1 / hi_;
  const Rational b = 1 / lo_;
  const BigInt da = floor_of(a);
  const BigInt db = floor_of(b);
  if (da != db || da > BigInt(UINT64_MAX)) return Status::exhausted;
  digit = static_cast<std::uint64_t>(da);
  const Rational d(da);
  lo_ = a - d;
  hi_ = b - d;
  ++index_;
  return Status::digit;
}

unsigned __int128 Alpha::fixed128() const {
  if (const auto* iv = std::get_if<Interval>(&source_)) {
    if (iv->lo >= 1) return ~static_cast<unsigned __int128>(0);
    return fixed128_from_rational(iv->lo);
  }
  // alpha lies between consecutive convergents; stop once both floor alike.
  Accumulator acc;
  DigitStream stream = digits();
  std::uint64_t d = 0;
  for (int i = 0; i < 4096; ++i) {
    if (stream.next(d) != DigitStream::Status::digit) {
      const Rational v = acc.value();
      return v >= 1 ? ~static_cast<unsigned __int128>(0) : fixed128_from_rational(v);
    }
    acc.push(d);
    const Rational a = acc.value();
    const Rational b = acc.previous();
    if (i > 0 && a < 1 && b < 1 && fixed128_from_rational(a) == fixed128_from_rational(b)) {
      return fixed128_from_rational(a);
    }
  }
  throw PrecisionExhausted("alpha: could not pin 128 bits from the digit list", 4096);
}

std::uint64_t Alpha::fixed64() const { return round_to_fixed64(fixed128()); }

long double Alpha::approx() const { return real_from_fixed128(fixed128()); }

// --- Gauss map ---------------------------------------------------------------

double gauss_map(double x) {
  if (x == 0.0) return 0.0;
  const double inv = 1.0 / x;
  return inv - std::floor(inv);
}

Rational gauss_map(const Rational& x) {
  if (x == 0) return Rational(0);
  const Rational inv = 1 / x;
  return inv - Rational(floor_of(inv));
}

// --- Expansion ----------------------------------------------------------------

long double CFState::error(std::size_t k) const {
  const Convergent& c = convergents.at(k);
  if (c.q == 0) return 1.0L;
  // frac(q alpha) in 128-bit fixed point; p is the nearest integer for k >= 2.
  const unsigned __int128 frac = static_cast<unsigned __int128>(c.q) * alpha_fixed;
  const long double f = real_from_fixed128(frac);
  if (k == 1) return alpha;
  return f < 0.5L ? f : 1.0L - f;
}

long double CFState::tail_value(std::size_t k) const {
  long double x = 0.0L;
  for (std::size_t i = digits.size(); i > k; --i) x = 1.0L / (static_cast<long double>(digits[i - 1]) + x);
  return x;
}

CFState expand(const Alpha& alpha, std::size_t n) {
  CFState state;
  state.order = n;
  state.alpha_fixed = alpha.fixed128();
  state.alpha = real_from_fixed128(state.alpha_fixed);
  state.convergents = {{1, 0}, {0, 1}};

  Alpha::DigitStream stream = alpha.digits();
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t d = 0;
    const auto status = stream.next(d);
    if (status == Alpha::DigitStream::Status::rational_end) break;
    if (status == Alpha::DigitStream::Status::exhausted) {
      throw PrecisionExhausted("expand: digit " + std::to_string(k) + " is not certified by the input precision", k);
    }
    const Convergent& c1 = state.convergents[k + 1];
    const Convergent& c0 = state.convergents[k];
    Convergent next{};
    if (!checked_step(d, c1.p, c0.p, next.p) || !checked_step(d, c1.q, c0.q, next.q)) {
      throw PrecisionExhausted("expand: convergent denominators overflow 64 bits", k);
    }
    state.digits.push_back(d);
    state.convergents.push_back(next);
  }
  if (stream.finished()) state.rational = state.convergents.back();
  return state;
}

// --- Natural extension -----------------------------------------------------

NaturalExtensionPoint natural_extension(const Alpha& alpha, const Alpha& beta, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "natural_extension needs n >= 1");

  std::vector<std::uint64_t> prefix;
  Alpha::DigitStream stream = alpha.digits();
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t d = 0;
    const auto status = stream.next(d);
    if (status == Alpha::DigitStream::Status::exhausted) {
      throw PrecisionExhausted("natural_extension: alpha digits exhausted", k);
    }
    if (status == Alpha::DigitStream::Status::rational_end) {
      const CFState s = expand(alpha, k);
      throw RationalDetected(s.convergents.back().p, s.convergents.back().q);
    }
    prefix.push_back(d);
  }

  NaturalExtensionPoint point;
  point.order = n;

  if (alpha.is_digit_list()) {
    // theta = [a_n, a_{n+1}, ...]
    Accumulator acc;
    std::uint64_t d = 0;
    while (acc.k * acc.k_prev < (BigInt(1) << 80) && stream.next(d) == Alpha::DigitStream::Status::digit) {
      acc.push(d);
    }
    point.theta = as_double(acc.value());
  } else {
    point.theta = as_double(Rational((stream.lo() + stream.hi()) / 2));
  }

  // omega = [a_{n-1}, ..., a_0, b_0, b_1, ...]
  Accumulator acc;
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) acc.push(*it);
  Alpha::DigitStream beta_digits = beta.digits();
  const BigInt target = BigInt(1) << 42;
  std::uint64_t b = 0;
  while (acc.k * acc.k <= target && beta_digits.next(b) == Alpha::DigitStream::Status::digit) acc.push(b);
  point.omega = as_double(acc.value());
  return point;
}

// --- Renormalization intervals ---------------------------------------------

double CircleArc::length() const { return real_from_fixed(length_fixed()); }
double CircleArc::start_real() const { return real_from_fixed(start); }
double CircleArc::end_real() const { return real_from_fixed(end); }

CircleArc renormalization_interval(const Alpha& alpha, std::uint64_t z, std::size_t n) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "J_n is defined for n >= 2");
  const CFState state = expand(alpha, n);
  if (state.convergents.size() <= n || (state.rational && state.truncated())) {
    const Convergent r = state.rational.value_or(state.convergents.back());
    throw RationalDetected(r.p, r.q);
  }
  if (state.error(n - 1) + state.error(n) >= 1.0L) {
    throw Error(ErrorKind::invalid_argument,
                "J_" + std::to_string(n) + " would cover the whole circle; use a larger n");
  }
  // The rotation runs on alpha rounded to 64 bits, off by up to 2^-65; after
  // q steps that drift must stay well below ||q alpha|| or the endpoints (and
  // even the side of z they fall on) are wrong.
  for (std::size_t k : {n - 1, n}) {
    const long double drift = std::ldexp(static_cast<long double>(state.convergents[k].q), -65);
    if (drift * 1024 > state.error(k)) {
      throw PrecisionExhausted("J_" + std::to_string(n) + ": q_" + std::to_string(k) +
                                   " is too large for a 64-bit rotation number",
                               n - 1);
    }
  }
  const std::uint64_t step = alpha.fixed64();
  const std::uint64_t a = z + state.convergents[n - 1].q * step;
  const std::uint64_t b = z + state.convergents[n].q * step;
  // q_k alpha - p_k is positive for odd k and negative for even k.
  return (n - 1) % 2 == 1 ? CircleArc{b, a} : CircleArc{a, b};
}

CircleArc renormalization_interval(const Alpha& alpha, double z, std::size_t n) {
  return renormalization_interval(alpha, fixed_from_real(z), n);
}

}  // namespace hitreturn
