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

// Measure-preserving systems with exact orbit arithmetic:
//
//   finite rotation   x -> x + r mod N on Z/N (counting measure)
//   circle rotation   x -> x + alpha mod 1, alpha a 64-bit fraction
//   doubling map      x -> 2x mod 1 (one-bit shift of the 64-bit word)
//
// Target sets are residue subsets, closed circle arcs, or half-open dyadic
// cells [i 2^-k, (i+1) 2^-k).

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hitreturn/cfrac.hpp"
#include "hitreturn/numeric.hpp"

namespace hitreturn {

// A residue mod N or a 64-bit fixed-point circle coordinate.
struct Point {
  std::uint64_t value = 0;

  friend auto operator<=>(const Point&, const Point&) = default;
};

class FiniteRotation {
 public:
  // Requires gcd(r, n) = 1; r may be negative.
  FiniteRotation(std::uint64_t n, std::int64_t r);

  std::uint64_t size() const { return n_; }
  std::uint64_t shift() const { return r_; }

 private:
  std::uint64_t n_;
  std::uint64_t r_;
};

class CircleRotation {
 public:
  explicit CircleRotation(std::uint64_t alpha);
  explicit CircleRotation(const Alpha& alpha) : CircleRotation(alpha.fixed64()) {}

  std::uint64_t alpha() const { return alpha_; }
  // The 64-bit alpha has few significant bits, so every orbit is periodic
  // with a short period (at most 2^32).
  bool near_rational() const;

 private:
  std::uint64_t alpha_;
};

struct Doubling {};

using System = std::variant<FiniteRotation, CircleRotation, Doubling>;

class Subset {
 public:
  Subset(std::uint64_t modulus, std::vector<std::uint64_t> residues);

  std::uint64_t modulus() const { return modulus_; }
  std::size_t size() const { return residues_.size(); }
  std::span<const std::uint64_t> residues() const { return residues_; }
  bool contains(std::uint64_t x) const { return x < modulus_ && member_[x]; }

 private:
  std::uint64_t modulus_;
  std::vector<std::uint64_t> residues_;  // sorted, unique
  std::vector<bool> member_;
};

class DyadicCell {
 public:
  // depth in [0, 63]; depth 0 is the whole circle.
  DyadicCell(unsigned depth, std::uint64_t index);

  unsigned depth() const { return depth_; }
  std::uint64_t index() const { return index_; }
  bool contains(std::uint64_t x) const { return depth_ == 0 || (x >> (64 - depth_)) == index_; }

 private:
  unsigned depth_;
  std::uint64_t index_;
};

using TargetSet = std::variant<Subset, CircleArc, DyadicCell>;

// mu(U): |U|/N, arc length, or 2^-k.
double measure(const TargetSet& u);
// Exact measure for subsets (|U|/N), arcs (L/2^64) and cells (2^-k).
Rational exact_measure(const TargetSet& u);

// Throws unless the set lives in the system's phase space.
void check_compatible(const System& s, const TargetSet& u);

Point step(const System& s, Point x);
// T^n x. Rotations use a single widened multiply; the doubling map throws
// PrecisionExhausted for n >= 64.
Point iterate_to(const System& s, Point x, std::uint64_t n);
bool contains(const TargetSet& u, Point x);

// finite rotation: every point when m >= N, else the first m of a seeded
// shuffle. Circle systems: m i.i.d. uniform 64-bit coordinates.
std::vector<Point> sample_points(const System& s, std::size_t m, std::uint64_t seed);

std::string describe(const System& s);
std::string describe(const TargetSet& u);

}  // namespace hitreturn
