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

#include "hitreturn/distfn.hpp"

#include <cmath>
#include <string>

namespace hitreturn {

LimitLaw LimitLaw::cf_hitting(double theta, double omega) {
  cf_hitting_law(theta, omega);  // validates
  return {Kind::cf_hitting, theta, omega};
}

LimitLaw LimitLaw::cf_return(double theta, double omega) {
  cf_hitting_law(theta, omega);
  return {Kind::cf_return, theta, omega};
}

namespace {

struct CfBreaks {
  double first;
  double second;
};

CfBreaks cf_breaks(double theta, double omega) {
  const double denom = 1.0 + theta * omega;
  return {(1.0 + theta) * omega / denom, (1.0 + theta) / denom};
}

}  // namespace

double LimitLaw::hitting_cdf(double t) const {
  if (t < 0.0) return 0.0;
  switch (kind) {
    case Kind::exponential:
      return -std::expm1(-t);
    case Kind::uniform_hitting:
      return std::min(t, 1.0);
    case Kind::cf_hitting:
    case Kind::cf_return: {
      const auto [first, second] = cf_breaks(theta, omega);
      if (t < first) return t;
      if (t >= second) return 1.0;
      return first + (1.0 - first) * (t - first) / (second - first);
    }
  }
  return 0.0;
}

double LimitLaw::return_cdf(double t) const {
  if (t < 0.0) return 0.0;
  switch (kind) {
    case Kind::exponential:
      return -std::expm1(-t);
    case Kind::uniform_hitting:
      return t >= 1.0 ? 1.0 : 0.0;
    case Kind::cf_hitting:
    case Kind::cf_return: {
      const auto [first, second] = cf_breaks(theta, omega);
      if (t < first) return 0.0;
      if (t >= second) return 1.0;
      return 1.0 - (1.0 - first) / (second - first);
    }
  }
  return 0.0;
}

StepFn<double> exponential_steps(const ExpGrid& grid) {
  if (!(grid.step > 0.0) || !(grid.horizon > grid.step)) {
    throw Error(ErrorKind::invalid_argument, "exponential law needs 0 < grid < horizon");
  }
  const auto cells = static_cast<std::size_t>(std::floor(grid.horizon / grid.step + 1e-9));
  std::vector<Breakpoint<double>> points;
  points.reserve(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    const double t = static_cast<double>(k) * grid.step;
    const double value = k + 1 == cells ? 1.0 : -std::expm1(-static_cast<double>(k + 1) * grid.step);
    points.push_back({t, value});
  }
  return StepFn<double>(std::move(points));
}

LawFunction make_law(const LimitLaw& law, const ExpGrid& grid) {
  switch (law.kind) {
    case LimitLaw::Kind::exponential:
      return exponential_steps(grid);
    case LimitLaw::Kind::uniform_hitting:
      return PLConcaveFn<double>({{0.0, 0.0}, {1.0, 1.0}});
    case LimitLaw::Kind::cf_hitting:
      return cf_hitting_law(law.theta, law.omega);
    case LimitLaw::Kind::cf_return:
      return cf_return_law(law.theta, law.omega);
  }
  throw Error(ErrorKind::invalid_argument, "unknown law");
}

double DerivativeReport::max_at(std::size_t index) const {
  double best = 0.0;
  for (double d : deviation.at(index)) best = std::max(best, d);
  return best;
}

DerivativeReport derivative_convergence_check(std::span<const PLConcaveFn<double>> sequence,
                                              const PLConcaveFn<double>& limit,
                                              std::span<const double> probes) {
  for (double p : probes) {
    for (const auto& k : limit.knots()) {
      if (p == k.t) {
        throw Error(ErrorKind::invalid_argument,
                    "derivative probe " + std::to_string(p) + " sits on a knot of the limit");
      }
    }
  }
  DerivativeReport report;
  report.probes.assign(probes.begin(), probes.end());
  for (const auto& f : sequence) {
    std::vector<double> row;
    row.reserve(probes.size());
    for (double p : probes) row.push_back(std::abs(f.right_derivative(p) - limit.right_derivative(p)));
    report.deviation.push_back(std::move(row));
  }
  return report;
}

}  // namespace hitreturn
