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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "hitreturn/distfn.hpp"

using namespace hitreturn;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

StepFn<double> unit_step(double at) { return StepFn<double>({{at, 1.0}}); }
PLConcaveFn<double> min_t_1() { return PLConcaveFn<double>({{0.0, 0.0}, {1.0, 1.0}}); }

bool has_rule(const ClassReport& r, const std::string& rule) {
  for (const auto& v : r.violations) {
    if (v.rule == rule) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("distfn") {

TEST_CASE("step evaluation is right-continuous and zero before the first jump") {
  const auto f = unit_step(1.0);
  CHECK(f(0.999) == 0.0);
  CHECK(f(1.0) == 1.0);
  CHECK(f(-5.0) == 0.0);
  CHECK(f.left_limit(1.0) == 0.0);

  const StepFn<double> z5({{0.8, 0.5}, {1.2, 1.0}});
  CHECK(z5(1.0) == 0.5);
  CHECK(z5(0.8) == 0.5);
  CHECK(z5(std::nextafter(0.8, 0.0)) == 0.0);
}

TEST_CASE("step functions reject malformed breakpoints") {
  CHECK_THROWS_AS(StepFn<double>({{1.0, 0.5}, {1.0, 0.7}}), Error);
  CHECK_THROWS_AS(StepFn<double>({{2.0, 0.5}, {1.0, 0.7}}), Error);
  CHECK_THROWS_AS(StepFn<double>({{NAN, 0.5}}), Error);
}

TEST_CASE("piecewise-linear evaluation") {
  const auto f = min_t_1();
  CHECK(f(0.5) == 0.5);
  CHECK(f(7.0) == 1.0);
  CHECK(f(-1.0) == 0.0);
  CHECK(f.right_derivative(0.5) == 1.0);
  CHECK(f.right_derivative(1.0) == 0.0);

  const PLConcaveFn<double> tail({{0.0, 0.0}, {0.5, 0.5}}, 0.25);
  CHECK(tail(1.5) == doctest::Approx(0.75));
  CHECK(tail.right_derivative(3.0) == 0.25);

  CHECK_THROWS_AS(PLConcaveFn<double>({{0.5, 0.0}, {1.0, 1.0}}), Error);
}

TEST_CASE("cf hitting law at the golden pair") {
  const auto f = cf_hitting_law(kGolden, kGolden);
  // (1+a)a = 1 for the golden mean, so the first knot is 1/(1+a^2).
  const double t1 = 1.0 / (1.0 + kGolden * kGolden);
  const double t2 = (1.0 + kGolden) / (1.0 + kGolden * kGolden);
  REQUIRE(f.knots().size() == 3);
  CHECK(f.knots()[1].t == doctest::Approx(0.7236068).epsilon(1e-7));
  CHECK(f.knots()[2].t == doctest::Approx(1.1708204).epsilon(1e-7));
  CHECK(f.knots()[1].t == doctest::Approx(t1).epsilon(1e-15));
  CHECK(f.knots()[2].t == doctest::Approx(t2).epsilon(1e-15));
  CHECK(f.slope(1) == doctest::Approx(0.6180340).epsilon(1e-7));
  CHECK(f(1.0) == doctest::Approx(0.8944272).epsilon(1e-7));
  CHECK(f(1.0) == doctest::Approx(t1 + kGolden * (1.0 - t1)).epsilon(1e-14));
  CHECK(validate_class_F(f).member());
}

TEST_CASE("cf return law at the golden pair") {
  const auto r = cf_return_law(kGolden, kGolden);
  REQUIRE(r.breakpoints().size() == 2);
  CHECK(r.breakpoints()[0].t == doctest::Approx(0.7236068).epsilon(1e-7));
  CHECK(r.breakpoints()[0].value == doctest::Approx(0.3819660).epsilon(1e-7));
  CHECK(r.breakpoints()[0].value == doctest::Approx(kGolden / (1 + kGolden)).epsilon(1e-14));
  CHECK(r.breakpoints()[1].t == doctest::Approx(1.1708204).epsilon(1e-7));
  CHECK(r.breakpoints()[1].value == 1.0);
  CHECK(validate_class_Ftilde(r).member());
}

TEST_CASE("cf return law equals the inverse transform of the hitting law on a parameter grid") {
  for (int i = 1; i <= 9; ++i) {
    for (int j = 0; j <= 9; ++j) {
      const Rational theta(i, 5);
      const Rational omega(j, 10);
      const auto hitting = cf_hitting_law(theta, omega);
      const auto returns = cf_return_law(theta, omega);
      CHECK(same_function(inverse_transform(hitting), returns));
      CHECK(same_function(forward_transform(returns), hitting));
      CHECK(validate_class_F(hitting).member());
      CHECK(validate_class_Ftilde(returns).member());
      // Plateau of the return law: theta / (1 + theta), independent of omega.
      if (omega > 0) {
        CHECK(returns.breakpoints()[0].value == theta / (1 + theta));
      }
    }
  }
}

TEST_CASE("cf laws reject parameters outside theta > 0, 0 <= omega < 1") {
  CHECK_THROWS_AS(cf_hitting_law(0.0, 0.5), Error);
  CHECK_THROWS_AS(cf_hitting_law(-1.0, 0.5), Error);
  CHECK_THROWS_AS(cf_hitting_law(0.5, 1.0), Error);
  CHECK_THROWS_AS(LimitLaw::cf_return(0.5, 1.5), Error);
}

TEST_CASE("forward transform examples") {
  CHECK(same_function(forward_transform(unit_step(1.0)), min_t_1()));

  const StepFn<Rational> z5({{Rational(4, 5), Rational(1, 2)}, {Rational(6, 5), Rational(1)}});
  const auto f = forward_transform(z5);
  const PLConcaveFn<Rational> expected(
      {{Rational(0), Rational(0)}, {Rational(4, 5), Rational(4, 5)}, {Rational(6, 5), Rational(1)}});
  CHECK(same_function(f, expected));
  CHECK(f.tail_slope() == 0);
}

TEST_CASE("forward transform of a sub-probability law keeps a positive tail slope") {
  const StepFn<Rational> f({{Rational(1, 2), Rational(1, 4)}});
  const auto g = forward_transform(f);
  CHECK(g.tail_slope() == Rational(3, 4));
  CHECK(g(Rational(2)) == Rational(1, 2) + Rational(3, 4) * Rational(3, 2));
}

TEST_CASE("forward transform rejects invalid input") {
  CHECK_THROWS_AS(forward_transform(StepFn<double>({{0.5, 0.6}, {1.0, 0.3}})), Error);
  CHECK_THROWS_AS(forward_transform(StepFn<double>({{0.5, 1.5}})), Error);
  CHECK_THROWS_AS(forward_transform(StepFn<double>({{-0.5, 0.5}})), Error);
}

TEST_CASE("inverse transform examples") {
  CHECK(same_function(inverse_transform(min_t_1()), unit_step(1.0)));
  const auto r = inverse_transform(cf_hitting_law(kGolden, kGolden));
  CHECK(r.breakpoints()[0].value == doctest::Approx(0.3819660).epsilon(1e-7));
}

TEST_CASE("inverse transform takes the right derivative at a kink") {
  const auto r = inverse_transform(min_t_1());
  CHECK(r(1.0) == 1.0);
  CHECK(r(std::nextafter(1.0, 0.0)) == 0.0);
}

TEST_CASE("inverse transform rejects a slope increase") {
  const PLConcaveFn<double> convex({{0.0, 0.0}, {0.5, 0.25}, {1.0, 1.0}});
  CHECK_THROWS_AS(inverse_transform(convex), Error);
}

TEST_CASE("validate_class_F") {
  CHECK(validate_class_F(min_t_1()).member());

  const PLConcaveFn<double> convex({{0.0, 0.0}, {0.5, 0.25}, {1.0, 1.0}});
  const auto report = validate_class_F(convex);
  CHECK_FALSE(report.member());
  CHECK(has_rule(report, "concave"));

  const PLConcaveFn<double> steep({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
  CHECK(has_rule(validate_class_F(steep), "bounded-by-identity"));

  const PLConcaveFn<double> decreasing({{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.4}});
  CHECK(has_rule(validate_class_F(decreasing), "nondecreasing"));

  const PLConcaveFn<double> lifted({{0.0, 0.1}, {1.0, 0.5}});
  CHECK(has_rule(validate_class_F(lifted), "zero-at-origin"));

  for (double w : {0.1, 0.3, 0.5, 0.9}) {
    for (double th : {0.2, 0.6, 1.0, 3.0}) CHECK(validate_class_F(cf_hitting_law(th, w)).member());
  }
}

TEST_CASE("validate_class_Ftilde") {
  CHECK(validate_class_Ftilde(unit_step(1.0)).member());

  const auto two = validate_class_Ftilde(unit_step(2.0));
  CHECK_FALSE(two.member());
  CHECK(has_rule(two, "integral"));
  CHECK(two.violations.front().magnitude == doctest::Approx(1.0));

  // Z/5 return law: integral 0.8 + 0.5 * 0.4 = 1, the Kac value.
  const StepFn<Rational> z5({{Rational(4, 5), Rational(1, 2)}, {Rational(6, 5), Rational(1)}});
  CHECK(return_integral(z5) == Rational(1));
  CHECK(validate_class_Ftilde(z5).member());

  const StepFn<double> sub({{0.5, 0.6}});
  const auto open = validate_class_Ftilde(sub);
  CHECK(open.indeterminate);
  CHECK_FALSE(open.member());
  // The integral up to the last breakpoint is 0.5; the tail bound decides.
  CHECK(validate_class_Ftilde(sub, std::optional<double>(0.1)).member());
  CHECK_FALSE(validate_class_Ftilde(sub, std::optional<double>(0.6)).member());

  CHECK(has_rule(validate_class_Ftilde(StepFn<double>({{-1.0, 0.5}, {0.5, 1.0}})), "zero-on-negatives"));
  CHECK(has_rule(validate_class_Ftilde(StepFn<double>({{0.3, 0.7}, {0.5, 0.2}, {0.6, 1.0}})), "nondecreasing"));
}

TEST_CASE("sup distance") {
  const auto f = min_t_1();
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  CHECK(sup_distance<double>(f, f, std::span<const double>(grid)) == 0.0);

  const std::vector<double> half{0.5};
  const auto expo = [](double t) { return -std::expm1(-t); };
  CHECK(sup_distance<double>(f, expo, std::span<const double>(half)) ==
        doctest::Approx(0.5 - (1.0 - std::exp(-0.5))).epsilon(1e-14));
  CHECK(sup_distance<double>(f, expo, std::span<const double>(half)) == doctest::Approx(0.1065307).epsilon(1e-6));

  // Jumps between grid points are still seen, from both sides.
  const StepFn<double> a({{0.55, 1.0}});
  const StepFn<double> b({{0.65, 1.0}});
  CHECK(sup_distance<double>(a, b, std::span<const double>(std::vector<double>{0.0, 1.0})) == 1.0);
  CHECK(grid_sup_distance<double>(a, b, std::span<const double>(std::vector<double>{0.0, 1.0})) == 0.0);

  CHECK_THROWS_AS(sup_distance<double>(a, b, std::span<const double>()), Error);
}

TEST_CASE("Z/5 hitting law against its interpolant attains mu(U)") {
  const StepFn<Rational> hitting({{Rational(2, 5), Rational(2, 5)},
                                  {Rational(4, 5), Rational(4, 5)},
                                  {Rational(6, 5), Rational(1)}});
  const PLConcaveFn<Rational> interpolant(
      {{Rational(0), Rational(0)}, {Rational(4, 5), Rational(4, 5)}, {Rational(6, 5), Rational(1)}});
  CHECK(exact_sup_distance(hitting, interpolant) == Rational(2, 5));
}

TEST_CASE("make_law") {
  const auto u = std::get<PLConcaveFn<double>>(make_law(LimitLaw::uniform_hitting()));
  CHECK(same_function(u, min_t_1()));

  const auto h = std::get<PLConcaveFn<double>>(make_law(LimitLaw::cf_hitting(kGolden, kGolden)));
  CHECK(h.knots()[1].t == doctest::Approx(0.7236068).epsilon(1e-7));
  const auto r = std::get<StepFn<double>>(make_law(LimitLaw::cf_return(kGolden, kGolden)));
  CHECK(same_function(r, inverse_transform(h)));

  const auto e = std::get<StepFn<double>>(make_law(LimitLaw::exponential(), ExpGrid{0.001, 20.0}));
  CHECK(e.breakpoints().size() == 20000);
  CHECK(e.final_value() == 1.0);
  CHECK(validate_class_Ftilde(e).member());
}

TEST_CASE("closed-form law values") {
  const auto golden = LimitLaw::cf_hitting(kGolden, kGolden);
  CHECK(golden.hitting_cdf(1.0) == doctest::Approx(0.8944272).epsilon(1e-7));
  CHECK(golden.return_cdf(1.0) == doctest::Approx(0.3819660).epsilon(1e-7));
  CHECK(golden.return_cdf(0.7) == 0.0);
  CHECK(golden.return_cdf(1.2) == 1.0);
  const auto expo = LimitLaw::exponential();
  CHECK(expo.hitting_cdf(1.0) == doctest::Approx(1 - std::exp(-1.0)));
  CHECK(expo.return_cdf(1.0) == doctest::Approx(1 - std::exp(-1.0)));
  const auto uni = LimitLaw::uniform_hitting();
  CHECK(uni.hitting_cdf(0.3) == 0.3);
  CHECK(uni.return_cdf(0.99) == 0.0);
  CHECK(uni.return_cdf(1.0) == 1.0);

  // Closed forms agree with the exact functions away from the jumps.
  const LimitLaw other = LimitLaw::cf_return(0.4, 0.7);
  const auto f = cf_hitting_law(0.4, 0.7);
  const auto g = inverse_transform(f);
  for (double t = 0.0; t < 3.0; t += 0.013) {
    CHECK(other.hitting_cdf(t) == doctest::Approx(f(t)).epsilon(1e-12));
    CHECK(other.return_cdf(t) == doctest::Approx(g(t)).epsilon(1e-12));
  }
}

TEST_CASE("exponential fixed point to first order in the grid step") {
  for (int k : {6, 8, 10}) {
    const double h = std::ldexp(1.0, -k);
    const auto f = forward_transform(exponential_steps(ExpGrid{h, 20.0}));
    std::vector<double> grid;
    for (int i = 0; i <= 20000; ++i) grid.push_back(i * 0.001);
    const double d =
        sup_distance<double>(f, [](double t) { return -std::expm1(-t); }, std::span<const double>(grid));
    CHECK(d <= h);
    CHECK(d > h / 8);  // genuinely first order, not exact
  }
}

TEST_CASE("derivative convergence check") {
  const auto limit = cf_hitting_law(kGolden, kGolden);
  const std::vector<double> probes{0.3, 0.95, 1.5};
  {
    const std::vector<PLConcaveFn<double>> same{limit, limit};
    const auto report = derivative_convergence_check(same, limit, probes);
    for (const auto& row : report.deviation) {
      for (double d : row) CHECK(d == 0.0);
    }
  }
  {
    std::vector<PLConcaveFn<double>> seq;
    for (int n = 1; n <= 6; ++n) seq.push_back(cf_hitting_law(kGolden + std::pow(0.5, n), kGolden));
    const auto report = derivative_convergence_check(seq, limit, probes);
    for (std::size_t n = 1; n < seq.size(); ++n) CHECK(report.deviation[n][1] <= report.deviation[n - 1][1]);
    CHECK(report.deviation.back()[1] < 0.02);
    CHECK(report.max_at(5) == doctest::Approx(report.deviation[5][1]));
  }
  const std::vector<double> on_knot{limit.knots()[1].t};
  CHECK_THROWS_AS(derivative_convergence_check(std::vector<PLConcaveFn<double>>{limit}, limit, on_knot), Error);
}

}  // TEST_SUITE
