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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "doctest.h"
#include "hitreturn/cfrac.hpp"
#include "hitreturn/dynsys.hpp"
#include "hitreturn/fixed_point.hpp"
#include "hitreturn/random.hpp"

using namespace hitreturn;
using Dec50 = boost::multiprecision::cpp_dec_float_50;

namespace {

// frac(x + n * golden) in 50-digit decimal arithmetic.
double golden_orbit(double x, unsigned long n) {
  const Dec50 g = (sqrt(Dec50(5)) - 1) / 2;
  Dec50 v = Dec50(x) + g * n;
  v -= floor(v);
  return v.convert_to<double>();
}

const System kGoldenRotation = CircleRotation(Alpha::golden());

}  // namespace

TEST_SUITE("dynsys") {

TEST_CASE("finite rotation needs coprime shift") {
  CHECK_THROWS_AS(FiniteRotation(6, 2), Error);
  CHECK_THROWS_AS(FiniteRotation(0, 1), Error);
  CHECK(FiniteRotation(5, -3).shift() == 2);
  CHECK(FiniteRotation(1, 0).size() == 1);
}

TEST_CASE("step") {
  CHECK(step(FiniteRotation(5, 2), Point{4}).value == 1);
  CHECK(std::fabs(real_from_fixed(step(kGoldenRotation, Point{fixed_from_real(0.5)}).value) - 0.1180340) < 1e-7);
  // within one unit of 2^-64 of the high-precision value
  const Dec50 exact = Dec50(0.5) + (sqrt(Dec50(5)) - 1) / 2 - 1;
  const Dec50 got = Dec50(step(kGoldenRotation, Point{fixed_from_real(0.5)}).value) / pow(Dec50(2), 64);
  CHECK(abs(got - exact) < pow(Dec50(2), -63));
  CHECK(step(Doubling{}, Point{fixed_from_real(0.75)}).value == fixed_from_real(0.5));
}

TEST_CASE("finite step is a bijection") {
  for (auto [n, r] : {std::pair{5ULL, 2LL}, {12ULL, 5LL}, {97ULL, 40LL}, {1ULL, 0LL}}) {
    const System s = FiniteRotation(n, r);
    std::set<std::uint64_t> image;
    for (std::uint64_t x = 0; x < n; ++x) image.insert(step(s, Point{x}).value);
    CHECK(image.size() == n);
    CHECK(*image.rbegin() == n - 1);
  }
  // near 2^64 the addition must not wrap
  const std::uint64_t big = (1ULL << 63) + 11;
  const System s = FiniteRotation(big, static_cast<std::int64_t>((1ULL << 62) + 1));
  CHECK(step(s, Point{big - 1}).value == (1ULL << 62));
}

TEST_CASE("iterate_to") {
  const Point x{fixed_from_real(0.05)};
  const double v = real_from_fixed(iterate_to(kGoldenRotation, x, 13).value);
  CHECK(v == doctest::Approx(0.0844419).epsilon(1e-6));
  CHECK(std::fabs(v - golden_orbit(0.05, 13)) < 1e-15);
  CHECK(std::fabs(real_from_fixed(iterate_to(kGoldenRotation, x, 1000000).value) - golden_orbit(0.05, 1000000)) <
        1e-12);

  CHECK(iterate_to(FiniteRotation(5, 2), Point{0}, 3).value == 1);
  for (const System& s : {System(FiniteRotation(5, 2)), kGoldenRotation, System(Doubling{})}) {
    CHECK(iterate_to(s, Point{3}, 0).value == 3);
  }
  CHECK(iterate_to(Doubling{}, Point{1}, 63).value == (1ULL << 63));
  CHECK_THROWS_AS(iterate_to(Doubling{}, Point{1}, 64), PrecisionExhausted);
}

TEST_CASE("iterate_to is a group action") {
  Engine gen(5);
  const System finite = FiniteRotation(1000003, 12345);
  for (int i = 0; i < 200; ++i) {
    const Point x{gen()};
    const std::uint64_t a = gen() % 100000, b = gen() % 100000;
    CHECK(iterate_to(kGoldenRotation, x, a + b).value ==
          iterate_to(kGoldenRotation, iterate_to(kGoldenRotation, x, a), b).value);
    const Point y{x.value % 1000003};
    CHECK(iterate_to(finite, y, a + b).value == iterate_to(finite, iterate_to(finite, y, a), b).value);
    const std::uint64_t c = gen() % 30, d = gen() % 30;
    CHECK(iterate_to(Doubling{}, x, c + d).value == iterate_to(Doubling{}, iterate_to(Doubling{}, x, c), d).value);
    // stepping agrees with the closed form
    Point z = y;
    for (std::uint64_t k = 0; k < 50; ++k) z = step(finite, z);
    CHECK(z.value == iterate_to(finite, y, 50).value);
  }
}

TEST_CASE("membership") {
  const CircleArc wrap{fixed_from_real(0.944), fixed_from_real(0.090)};
  CHECK(contains(wrap, Point{fixed_from_real(0.01)}));
  CHECK_FALSE(contains(wrap, Point{fixed_from_real(0.5)}));
  CHECK(contains(wrap, Point{wrap.start}));
  CHECK(contains(wrap, Point{wrap.end}));

  const DyadicCell cell(3, 5);
  CHECK_FALSE(contains(cell, Point{fixed_from_real(0.75)}));
  CHECK(contains(cell, Point{fixed_from_real(0.625)}));
  CHECK(contains(cell, Point{fixed_from_real(0.7499)}));
  CHECK(contains(DyadicCell(0, 0), Point{12345}));
  CHECK_THROWS_AS(DyadicCell(3, 8), Error);
  CHECK_THROWS_AS(DyadicCell(64, 0), Error);

  const Subset u(5, {0, 1});
  CHECK_FALSE(contains(u, Point{3}));
  CHECK(contains(u, Point{1}));
  CHECK_THROWS_AS(Subset(5, {}), Error);
  CHECK_THROWS_AS(Subset(5, {5}), Error);
}

TEST_CASE("measures") {
  CHECK(exact_measure(Subset(5, {0, 1, 1})) == Rational(2, 5));
  CHECK(exact_measure(DyadicCell(10, 3)) == Rational(1, 1024));
  CHECK(measure(DyadicCell(10, 3)) == std::ldexp(1.0, -10));
  const CircleArc arc{fixed_from_real(0.25), fixed_from_real(0.75)};
  CHECK(measure(arc) == 0.5);
  CHECK(exact_measure(arc) == Rational(1, 2));
}

TEST_CASE("compatibility of systems and sets") {
  CHECK_THROWS_AS(check_compatible(FiniteRotation(5, 2), DyadicCell(2, 1)), Error);
  CHECK_THROWS_AS(check_compatible(FiniteRotation(5, 2), Subset(7, {1})), Error);
  CHECK_THROWS_AS(check_compatible(Doubling{}, Subset(5, {1})), Error);
  CHECK_NOTHROW(check_compatible(Doubling{}, DyadicCell(2, 1)));
  CHECK_NOTHROW(check_compatible(kGoldenRotation, CircleArc{0, 1000}));
}

TEST_CASE("sampling") {
  const auto all = sample_points(FiniteRotation(5, 2), 5, 9);
  std::vector<std::uint64_t> values;
  for (auto p : all) values.push_back(p.value);
  CHECK(values == std::vector<std::uint64_t>{0, 1, 2, 3, 4});

  const auto some = sample_points(FiniteRotation(1000, 3), 100, 9);
  std::set<std::uint64_t> distinct;
  for (auto p : some) distinct.insert(p.value);
  CHECK(distinct.size() == 100);
  CHECK(*distinct.rbegin() < 1000);

  CHECK(sample_points(kGoldenRotation, 2, 42) == sample_points(kGoldenRotation, 2, 42));
  CHECK(sample_points(kGoldenRotation, 2, 42) != sample_points(kGoldenRotation, 2, 43));

  const std::size_t m = 100000;
  const auto pts = sample_points(kGoldenRotation, m, 7);
  double mean = 0;
  for (auto p : pts) mean += real_from_fixed(p.value);
  mean /= static_cast<double>(m);
  CHECK(mean >= 0.497);
  CHECK(mean <= 0.503);
}

TEST_CASE("rotation preserves Lebesgue measure statistically") {
  const std::size_t m = 100000;
  const auto pts = sample_points(kGoldenRotation, m, 11);
  for (auto [a, b] : {std::pair{0.1, 0.3}, {0.7, 0.75}, {0.9, 0.2}}) {
    const CircleArc arc{fixed_from_real(a), fixed_from_real(b)};
    std::size_t before = 0, after = 0;
    for (auto p : pts) {
      before += contains(arc, p);
      after += contains(arc, step(kGoldenRotation, p));
    }
    const double p = arc.length();
    const double bound = 4 * std::sqrt(p * (1 - p) / static_cast<double>(m));
    CHECK(std::fabs(static_cast<double>(before) - static_cast<double>(after)) / static_cast<double>(m) <= bound);
  }
}

TEST_CASE("near-rational rotation numbers are flagged") {
  CHECK(CircleRotation(1ULL << 63).near_rational());
  CHECK_FALSE(CircleRotation(Alpha::golden()).near_rational());
  CHECK_THROWS_AS(CircleRotation(0), Error);
}

}  // TEST_SUITE
