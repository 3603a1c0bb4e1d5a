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

// Sub-probability distribution functions on [0, inf) and the integral
// duality between return-time laws (right-continuous step functions) and
// hitting-time laws (continuous concave piecewise-linear functions):
//
//     F(t) = int_0^t (1 - Ftilde(s)) ds,      Ftilde = 1 - F'+.
//
// Everything is templated on the scalar so that exact finite-system checks
// can run over Rational while simulation output stays in double.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hitreturn/error.hpp"
#include "hitreturn/numeric.hpp"

namespace hitreturn {

template <class T>
struct Breakpoint {
  T t;
  T value;  // attained at and after t
};

// Right-continuous step function, 0 before the first breakpoint.
//
// Construction only enforces structure (strictly increasing breakpoints);
// monotonicity and range belong to class validation so that invalid input
// can still be represented and reported on.
template <class T>
class StepFn {
 public:
  StepFn() = default;

  explicit StepFn(std::vector<Breakpoint<T>> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(points_[i].t) || !std::isfinite(points_[i].value)) {
          throw Error(ErrorKind::invalid_argument, "StepFn: non-finite breakpoint");
        }
      }
      if (i > 0 && !(points_[i - 1].t < points_[i].t)) {
        throw Error(ErrorKind::invalid_argument,
                    "StepFn: breakpoints must be strictly increasing");
      }
    }
  }

  T operator()(const T& t) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](const T& x, const Breakpoint<T>& b) { return x < b.t; });
    return it == points_.begin() ? T(0) : std::prev(it)->value;
  }

  // lim_{s -> t-} f(s)
  T left_limit(const T& t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t,
                               [](const Breakpoint<T>& b, const T& x) { return b.t < x; });
    return it == points_.begin() ? T(0) : std::prev(it)->value;
  }

  std::span<const Breakpoint<T>> breakpoints() const { return points_; }
  bool empty() const { return points_.empty(); }
  T final_value() const { return points_.empty() ? T(0) : points_.back().value; }

 private:
  std::vector<Breakpoint<T>> points_;
};

template <class T>
struct Knot {
  T t;
  T y;
};

// Continuous piecewise-linear function through `knots`, zero for t < 0 and
// continued past the last knot with slope `tail_slope` (0 = constant).
// The first knot must sit at t = 0.
template <class T>
class PLConcaveFn {
 public:
  PLConcaveFn() : knots_{{T(0), T(0)}}, tail_slope_(0) {}

  explicit PLConcaveFn(std::vector<Knot<T>> knots, T tail_slope = T(0))
      : knots_(std::move(knots)), tail_slope_(std::move(tail_slope)) {
    if (knots_.empty() || knots_.front().t != T(0)) {
      throw Error(ErrorKind::invalid_argument, "PLConcaveFn: first knot must be at t = 0");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(knots_[i].t) || !std::isfinite(knots_[i].y)) {
          throw Error(ErrorKind::invalid_argument, "PLConcaveFn: non-finite knot");
        }
      }
      if (i > 0 && !(knots_[i - 1].t < knots_[i].t)) {
        throw Error(ErrorKind::invalid_argument,
                    "PLConcaveFn: knot abscissae must be strictly increasing");
      }
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(tail_slope_)) {
        throw Error(ErrorKind::invalid_argument, "PLConcaveFn: non-finite tail slope");
      }
    }
  }

  T operator()(const T& t) const {
    if (t < T(0)) return T(0);
    const std::size_t i = segment(t);
    if (i + 1 == knots_.size()) {
      return knots_[i].y + tail_slope_ * (t - knots_[i].t);
    }
    const Knot<T>& a = knots_[i];
    const Knot<T>& b = knots_[i + 1];
    return a.y + (b.y - a.y) * (t - a.t) / (b.t - a.t);
  }

  T right_derivative(const T& t) const {
    if (t < T(0)) return T(0);
    const std::size_t i = segment(t);
    return i + 1 == knots_.size() ? tail_slope_ : slope(i);
  }

  // Slope of the segment [knots[i], knots[i+1]].
  T slope(std::size_t i) const {
    return (knots_[i + 1].y - knots_[i].y) / (knots_[i + 1].t - knots_[i].t);
  }

  std::span<const Knot<T>> knots() const { return knots_; }
  const T& tail_slope() const { return tail_slope_; }

 private:
  // Index of the knot starting the piece that contains t >= 0.
  std::size_t segment(const T& t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](const T& x, const Knot<T>& k) { return x < k.t; });
    return static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
  }

  std::vector<Knot<T>> knots_;
  T tail_slope_;
};

// ---------------------------------------------------------------------------
// Class membership

struct Violation {
  std::string rule;
  double witness;    // a point where the rule fails
  double magnitude;  // how badly
};

struct ClassReport {
  std::vector<Violation> violations;
  // Set when the return-law integral could not be decided (the function does
  // not saturate and no tail bound was given). Also recorded as a violation.
  bool indeterminate = false;

  bool member() const { return violations.empty(); }
};

namespace detail {

// int_0^{last breakpoint} (1 - f) and the final level.
template <class T>
std::pair<T, T> integral_to_last_breakpoint(const StepFn<T>& f) {
  T total(0);
  T last_t(0);
  T level(0);
  for (const auto& b : f.breakpoints()) {
    if (b.t <= T(0)) {
      level = b.value;
      continue;
    }
    total += (b.t - last_t) * (T(1) - level);
    last_t = b.t;
    level = b.value;
  }
  return {total, level};
}

}  // namespace detail

// int_0^inf (1 - f(s)) ds, exact from the step representation. Empty when the
// final value is below 1 (the integral diverges unless a tail bound applies).
template <class T>
std::optional<T> return_integral(const StepFn<T>& f) {
  auto [total, level] = detail::integral_to_last_breakpoint(f);
  if (level < T(1) - TieTolerance<T>::value()) return std::nullopt;
  return total;
}

// Hitting-law class: zero at the origin, nondecreasing, concave,
// F(t) <= t, values in [0, 1].
template <class T>
ClassReport validate_class_F(const PLConcaveFn<T>& f) {
  const T tol = TieTolerance<T>::value();
  ClassReport report;
  auto add = [&](const char* rule, const T& at, const T& by) {
    report.violations.push_back({rule, as_double(at), as_double(by)});
  };

  const auto knots = f.knots();
  if (knots.front().y != T(0)) add("zero-at-origin", T(0), abs_of(knots.front().y));

  std::optional<T> previous_slope;
  auto check_slope = [&](const T& s, const T& at) {
    if (s < -tol) add("nondecreasing", at, -s);
    if (previous_slope && s > *previous_slope + tol) add("concave", at, s - *previous_slope);
    previous_slope = s;
  };
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) check_slope(f.slope(i), knots[i].t);
  check_slope(f.tail_slope(), knots.back().t);

  for (const auto& k : knots) {
    if (k.y > k.t + tol) add("bounded-by-identity", k.t, k.y - k.t);
    if (k.y > T(1) + tol) add("range", k.t, k.y - T(1));
    if (k.y < -tol) add("range", k.t, -k.y);
  }
  if (f.tail_slope() > tol) {
    const auto& last = knots.back();
    const T crossing = last.y < T(1) ? last.t + (T(1) - last.y) / f.tail_slope() : last.t;
    add("range", crossing, f.tail_slope());
  }
  return report;
}

// Return-law class: nondecreasing, zero on negatives, values in [0, 1],
// int_0^inf (1 - f) <= 1. A function that does not reach 1 needs
// `tail_bound` (an upper bound on the integral past the last breakpoint).
template <class T>
ClassReport validate_class_Ftilde(const StepFn<T>& f, std::optional<T> tail_bound = std::nullopt) {
  const T tol = TieTolerance<T>::value();
  ClassReport report;
  auto add = [&](const char* rule, const T& at, const T& by) {
    report.violations.push_back({rule, as_double(at), as_double(by)});
  };

  T previous(0);
  for (const auto& b : f.breakpoints()) {
    if (b.t < T(0) && b.value != T(0)) add("zero-on-negatives", b.t, abs_of(b.value));
    if (b.value < -tol) add("range", b.t, -b.value);
    if (b.value > T(1) + tol) add("range", b.t, b.value - T(1));
    if (b.value < previous - tol) add("nondecreasing", b.t, previous - b.value);
    previous = b.value;
  }

  const T last_t = f.empty() ? T(0) : f.breakpoints().back().t;
  std::optional<T> integral = return_integral(f);
  if (!integral && tail_bound) {
    // Integral over [0, last breakpoint] plus the caller's bound for the rest.
    integral = detail::integral_to_last_breakpoint(f).first + *tail_bound;
  }
  if (!integral) {
    report.indeterminate = true;
    add("integral-indeterminate", last_t, T(1) - f.final_value());
  } else if (*integral > T(1) + tol) {
    add("integral", last_t, *integral - T(1));
  }
  return report;
}

// ---------------------------------------------------------------------------
// The duality transform

// F(t) = int_0^t (1 - ft(s)) ds, integrated exactly. Knots sit at 0 and at
// each positive breakpoint of ft; slopes are 1 - (ft values).
template <class T>
PLConcaveFn<T> forward_transform(const StepFn<T>& ft) {
  const T tol = TieTolerance<T>::value();
  T previous(0);
  for (const auto& b : ft.breakpoints()) {
    if (b.t < T(0) && b.value != T(0)) {
      throw Error(ErrorKind::invalid_argument, "forward_transform: nonzero value at negative time");
    }
    if (b.value < -tol || b.value > T(1) + tol) {
      throw Error(ErrorKind::invalid_argument, "forward_transform: value outside [0, 1]");
    }
    if (b.value < previous - tol) {
      throw Error(ErrorKind::invalid_argument, "forward_transform: values must be nondecreasing");
    }
    previous = b.value;
  }

  std::vector<Knot<T>> knots{{T(0), T(0)}};
  knots.reserve(ft.breakpoints().size() + 1);
  T y(0);
  T last_t(0);
  T level(0);
  for (const auto& b : ft.breakpoints()) {
    if (b.t > T(0)) {
      y += (b.t - last_t) * (T(1) - level);
      knots.push_back({b.t, y});
      last_t = b.t;
    }
    level = b.value;
  }
  return PLConcaveFn<T>(std::move(knots), T(1) - level);
}

// Ftilde = 1 - F'+, right-continuous. Breakpoints sit at F's knots; knots
// where the slope does not change produce no breakpoint.
template <class T>
StepFn<T> inverse_transform(const PLConcaveFn<T>& f) {
  const T tol = TieTolerance<T>::value();
  const auto knots = f.knots();
  if (knots.front().y != T(0)) {
    throw Error(ErrorKind::invalid_argument, "inverse_transform: requires F(0) = 0");
  }

  std::vector<T> slopes;
  slopes.reserve(knots.size());
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) slopes.push_back(f.slope(i));
  slopes.push_back(f.tail_slope());

  std::vector<Breakpoint<T>> points;
  T previous(0);
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    if (slopes[i] < -tol) {
      throw Error(ErrorKind::invalid_argument, "inverse_transform: F must be nondecreasing");
    }
    if (i > 0 && slopes[i] > slopes[i - 1] + tol) {
      throw Error(ErrorKind::invalid_argument, "inverse_transform: F is not concave");
    }
    T value = T(1) - slopes[i];
    if (value < previous) value = previous;  // tie within tolerance
    if (value != previous) points.push_back({knots[i].t, value});
    previous = value;
  }
  return StepFn<T>(std::move(points));
}

// ---------------------------------------------------------------------------
// Exact comparisons

// True when both functions agree at every real point.
template <class T>
bool same_function(const StepFn<T>& a, const StepFn<T>& b) {
  for (const auto& p : a.breakpoints()) {
    if (a(p.t) != b(p.t) || a.left_limit(p.t) != b.left_limit(p.t)) return false;
  }
  for (const auto& p : b.breakpoints()) {
    if (a(p.t) != b(p.t) || a.left_limit(p.t) != b.left_limit(p.t)) return false;
  }
  return true;
}

template <class T>
bool same_function(const PLConcaveFn<T>& a, const PLConcaveFn<T>& b) {
  for (const auto& k : a.knots()) {
    if (a(k.t) != b(k.t)) return false;
  }
  for (const auto& k : b.knots()) {
    if (a(k.t) != b(k.t)) return false;
  }
  // Both are linear past the later last knot.
  const T far = std::max(a.knots().back().t, b.knots().back().t);
  return a.right_derivative(far) == b.right_derivative(far);
}

namespace detail {

template <class T>
void features(const StepFn<T>& f, const T& lo, const T& hi, std::vector<T>& out) {
  for (const auto& b : f.breakpoints()) {
    if (b.t >= lo && b.t <= hi) out.push_back(b.t);
  }
}

template <class T>
void features(const PLConcaveFn<T>& f, const T& lo, const T& hi, std::vector<T>& out) {
  for (const auto& k : f.knots()) {
    if (k.t >= lo && k.t <= hi) out.push_back(k.t);
  }
}

template <class T, class F>
void features(const F&, const T&, const T&, std::vector<T>&) {}

template <class T>
T value_before(const StepFn<T>& f, const T& t) {
  return f.left_limit(t);
}

template <class T>
T value_before(const PLConcaveFn<T>& f, const T& t) {
  return f(t);
}

template <class T, class F>
T value_before(const F& f, const T& t) {
  if constexpr (std::is_floating_point_v<T>) {
    return f(std::nextafter(t, -std::numeric_limits<T>::infinity()));
  } else {
    return f(t);
  }
}

template <class T>
T abs_diff(const T& a, const T& b) {
  return a < b ? b - a : a - b;
}

}  // namespace detail

// max |a(t) - b(t)| over the grid only.
template <class T, class A, class B>
T grid_sup_distance(const A& a, const B& b, std::span<const T> grid) {
  if (grid.empty()) throw Error(ErrorKind::invalid_argument, "sup_distance: empty grid");
  T best(0);
  for (const T& t : grid) best = std::max(best, detail::abs_diff<T>(a(t), b(t)));
  return best;
}

// max |a(t) - b(t)| over the grid, plus every breakpoint or knot of either
// argument inside the grid's range, taking both one-sided values at jumps.
// For step vs. piecewise-linear arguments this is the exact supremum over
// the grid's hull.
template <class T, class A, class B>
T sup_distance(const A& a, const B& b, std::span<const T> grid) {
  T best = grid_sup_distance<T>(a, b, grid);
  const auto [lo_it, hi_it] = std::minmax_element(grid.begin(), grid.end());
  std::vector<T> points;
  detail::features(a, *lo_it, *hi_it, points);
  detail::features(b, *lo_it, *hi_it, points);
  for (const T& t : points) {
    best = std::max(best, detail::abs_diff<T>(a(t), b(t)));
    best = std::max(best, detail::abs_diff<T>(detail::value_before(a, t),
                                              detail::value_before(b, t)));
  }
  return best;
}

// Exact supremum over [0, inf) of |F_step - F_pl| when both end constant.
template <class T>
T exact_sup_distance(const StepFn<T>& a, const PLConcaveFn<T>& b) {
  std::vector<T> grid{T(0)};
  T hi(0);
  if (!a.empty()) hi = std::max(hi, a.breakpoints().back().t);
  hi = std::max(hi, b.knots().back().t);
  grid.push_back(hi);
  return sup_distance<T>(a, b, std::span<const T>(grid));
}

// ---------------------------------------------------------------------------
// Closed-form limit laws

// The continuous piecewise-linear hitting law of a circle rotation along a
// renormalization subsequence with limit point (theta, omega):
// slope 1 up to (1+theta)omega/(1+theta omega), then linear up to the value 1
// at (1+theta)/(1+theta omega), constant after.
template <class T>
PLConcaveFn<T> cf_hitting_law(const T& theta, const T& omega) {
  if (!(theta > T(0)) || !(omega >= T(0)) || !(omega < T(1))) {
    throw Error(ErrorKind::invalid_argument, "cf law requires theta > 0 and 0 <= omega < 1");
  }
  const T denom = T(1) + theta * omega;
  const T first = (T(1) + theta) * omega / denom;
  const T second = (T(1) + theta) / denom;
  std::vector<Knot<T>> knots{{T(0), T(0)}};
  if (first > T(0)) knots.push_back({first, first});
  knots.push_back({second, T(1)});
  return PLConcaveFn<T>(std::move(knots));
}

// The matching return law, obtained through the duality.
template <class T>
StepFn<T> cf_return_law(const T& theta, const T& omega) {
  return inverse_transform(cf_hitting_law(theta, omega));
}

struct LimitLaw {
  enum class Kind { exponential, uniform_hitting, cf_hitting, cf_return };

  Kind kind = Kind::exponential;
  double theta = 0.0;
  double omega = 0.0;

  static LimitLaw exponential() { return {Kind::exponential}; }
  static LimitLaw uniform_hitting() { return {Kind::uniform_hitting}; }
  static LimitLaw cf_hitting(double theta, double omega);
  static LimitLaw cf_return(double theta, double omega);

  // Closed-form values of the hitting and return laws this law belongs to.
  double hitting_cdf(double t) const;
  double return_cdf(double t) const;
};

struct ExpGrid {
  double step = 1.0 / 1024.0;
  double horizon = 20.0;
};

using LawFunction = std::variant<StepFn<double>, PLConcaveFn<double>>;

// exponential -> step discretization of 1 - e^{-t}: value 1 - e^{-(k+1)h} on
// [kh, (k+1)h), saturating to 1 at the last grid point below the horizon.
// uniform-hitting -> min(t, 1). cf-hitting / cf-return -> exact three-piece
// and two-jump functions.
LawFunction make_law(const LimitLaw& law, const ExpGrid& grid = {});

StepFn<double> exponential_steps(const ExpGrid& grid);

// ---------------------------------------------------------------------------
// Right-derivative convergence

struct DerivativeReport {
  std::vector<double> probes;
  // deviation[n][j] = |f_n'+(probes[j]) - limit'+(probes[j])|
  std::vector<std::vector<double>> deviation;

  double max_at(std::size_t index) const;
};

// Probes placed exactly on a knot of the limit are rejected.
DerivativeReport derivative_convergence_check(std::span<const PLConcaveFn<double>> sequence,
                                              const PLConcaveFn<double>& limit,
                                              std::span<const double> probes);

}  // namespace hitreturn
