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

#include "hitreturn/dynsys.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "hitreturn/fixed_point.hpp"
#include "hitreturn/random.hpp"

namespace hitreturn {

FiniteRotation::FiniteRotation(std::uint64_t n, std::int64_t r) : n_(n), r_(0) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "finite rotation needs N >= 1");
  const auto sn = static_cast<std::int64_t>(n);
  std::int64_t reduced = r % sn;
  if (reduced < 0) reduced += sn;
  r_ = static_cast<std::uint64_t>(reduced);
  if (std::gcd(r_, n_) != 1) {
    throw Error(ErrorKind::invalid_argument,
                "finite rotation needs gcd(r, N) = 1 for ergodicity (N=" + std::to_string(n) +
                    ", r=" + std::to_string(r) + ")");
  }
}

CircleRotation::CircleRotation(std::uint64_t alpha) : alpha_(alpha) {
  if (alpha == 0) throw Error(ErrorKind::invalid_argument, "rotation angle must be nonzero");
}

bool CircleRotation::near_rational() const { return std::countr_zero(alpha_) >= 32; }

Subset::Subset(std::uint64_t modulus, std::vector<std::uint64_t> residues)
    : modulus_(modulus), residues_(std::move(residues)), member_(modulus, false) {
  std::sort(residues_.begin(), residues_.end());
  residues_.erase(std::unique(residues_.begin(), residues_.end()), residues_.end());
  if (residues_.empty()) throw Error(ErrorKind::invalid_argument, "target subset must be nonempty");
  for (auto x : residues_) {
    if (x >= modulus_) {
      throw Error(ErrorKind::invalid_argument,
                  "residue " + std::to_string(x) + " is not below N=" + std::to_string(modulus_));
    }
    member_[x] = true;
  }
}

DyadicCell::DyadicCell(unsigned depth, std::uint64_t index) : depth_(depth), index_(index) {
  if (depth > 63) throw Error(ErrorKind::invalid_argument, "dyadic depth must be at most 63");
  if (index >> depth != 0) {
    throw Error(ErrorKind::invalid_argument, "dyadic index must be below 2^depth");
  }
}

double measure(const TargetSet& u) { return as_double(exact_measure(u)); }

Rational exact_measure(const TargetSet& u) {
  struct Visitor {
    Rational operator()(const Subset& s) const { return Rational(s.size(), s.modulus()); }
    Rational operator()(const CircleArc& a) const {
      // Closed arc of L lattice steps; the endpoint itself carries no mass.
      return Rational(BigInt(a.length_fixed()), BigInt(1) << 64);
    }
    Rational operator()(const DyadicCell& c) const { return Rational(BigInt(1), BigInt(1) << c.depth()); }
  };
  return std::visit(Visitor{}, u);
}

void check_compatible(const System& s, const TargetSet& u) {
  const bool finite = std::holds_alternative<FiniteRotation>(s);
  if (const auto* sub = std::get_if<Subset>(&u)) {
    if (!finite) throw Error(ErrorKind::invalid_argument, "residue subsets need a finite system");
    if (sub->modulus() != std::get<FiniteRotation>(s).size()) {
      throw Error(ErrorKind::invalid_argument, "subset modulus does not match the system");
    }
    return;
  }
  if (finite) throw Error(ErrorKind::invalid_argument, "circle sets need a circle system");
  if (const auto* arc = std::get_if<CircleArc>(&u); arc && arc->length_fixed() == 0) {
    throw Error(ErrorKind::invalid_argument, "arc has zero length");
  }
}

Point step(const System& s, Point x) {
  struct Visitor {
    Point x;
    Point operator()(const FiniteRotation& f) const {
      // x, r < N: one conditional subtraction, also when the sum wraps.
      const std::uint64_t y = x.value + f.shift();
      return {(y < x.value || y >= f.size()) ? y - f.size() : y};
    }
    Point operator()(const CircleRotation& r) const { return {x.value + r.alpha()}; }
    Point operator()(const Doubling&) const { return {x.value << 1}; }
  };
  return std::visit(Visitor{x}, s);
}

Point iterate_to(const System& s, Point x, std::uint64_t n) {
  struct Visitor {
    Point x;
    std::uint64_t n;
    Point operator()(const FiniteRotation& f) const {
      const auto shift = static_cast<std::uint64_t>(static_cast<unsigned __int128>(f.shift()) * n % f.size());
      return {static_cast<std::uint64_t>((static_cast<unsigned __int128>(x.value) + shift) % f.size())};
    }
    Point operator()(const CircleRotation& r) const { return {x.value + n * r.alpha()}; }
    Point operator()(const Doubling&) const {
      if (n >= 64) {
        throw PrecisionExhausted("doubling map: all 64 bits of the point are consumed after 63 steps", 63);
      }
      return {x.value << n};
    }
  };
  return std::visit(Visitor{x, n}, s);
}

bool contains(const TargetSet& u, Point x) {
  return std::visit([&](const auto& set) { return set.contains(x.value); }, u);
}

std::vector<Point> sample_points(const System& s, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw Error(ErrorKind::invalid_argument, "sample size must be positive");
  std::vector<Point> points;
  Engine gen(seed);
  if (const auto* f = std::get_if<FiniteRotation>(&s)) {
    const std::uint64_t n = f->size();
    if (m >= n) {
      points.reserve(n);
      for (std::uint64_t x = 0; x < n; ++x) points.push_back({x});
      return points;
    }
    // Partial Fisher-Yates over the implicit identity permutation.
    std::unordered_map<std::uint64_t, std::uint64_t> moved;
    auto at = [&](std::uint64_t i) {
      auto it = moved.find(i);
      return it == moved.end() ? i : it->second;
    };
    points.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
      const std::uint64_t j = i + uniform_below(gen, n - i);
      const std::uint64_t vi = at(i);
      const std::uint64_t vj = at(j);
      moved[j] = vi;
      points.push_back({vj});
    }
    return points;
  }
  points.reserve(m);
  for (std::size_t i = 0; i < m; ++i) points.push_back({gen()});
  return points;
}

std::string describe(const System& s) {
  std::ostringstream out;
  if (const auto* f = std::get_if<FiniteRotation>(&s)) {
    out << "finite:" << f->size() << ',' << f->shift();
  } else if (const auto* r = std::get_if<CircleRotation>(&s)) {
    out << "rot:" << format_hex(r->alpha());
  } else {
    out << "doubling";
  }
  return out.str();
}

std::string describe(const TargetSet& u) {
  std::ostringstream out;
  if (const auto* sub = std::get_if<Subset>(&u)) {
    out << "subset:";
    for (std::size_t i = 0; i < sub->residues().size(); ++i) out << (i ? "," : "") << sub->residues()[i];
  } else if (const auto* arc = std::get_if<CircleArc>(&u)) {
    out << "arc:" << format_hex(arc->start) << ',' << format_hex(arc->end);
  } else {
    const auto& c = std::get<DyadicCell>(u);
    out << "dyadic:" << c.depth() << ',' << c.index();
  }
  return out.str();
}

}  // namespace hitreturn
