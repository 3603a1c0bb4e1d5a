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

// Hitting and return times to a target set U:
//
//   tau_U(x) = min { k >= 1 : T^k x in U }
//
// normalized by mu(U). Exact decomposition for finite rotations, sampled
// empirical laws for circle systems.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hitreturn/distfn.hpp"
#include "hitreturn/dynsys.hpp"

namespace hitreturn {

struct HitRecord {
  std::uint64_t start_index = 0;
  std::optional<std::uint64_t> tau;  // empty: not hit within the cap
  bool from_u = false;               // start lies in U, so tau is a return time
};

struct HittingSample {
  double mu_u = 0;
  std::uint64_t cap = 0;
  std::vector<HitRecord> records;
  // Some doubling-map orbit ran past the 64 bits of its start point and was
  // continued with fresh random bits.
  bool extended_tail = false;

  double nothit_fraction() const;
};

// cap = ceil(cap_factor / mu)
std::uint64_t cap_for(double mu, double cap_factor);

// mu(U) * tau, evaluated exactly where the measure allows it.
double normalized_time(const TargetSet& u, std::uint64_t tau);

// Least k in [1, cap] with T^k x in U. On the doubling map the orbit is the
// bit shift of the 64-bit word, so PrecisionExhausted (carrying the last
// step reached) is thrown once the membership test would need bits the
// point does not have.
std::optional<std::uint64_t> hitting_time(const System& s, const TargetSet& u, Point x,
                                          std::uint64_t cap);

// Hitting times of a batch of starts, in start order whatever the thread
// count. Doubling-map orbits are continued past 64 bits with bits drawn from
// an independent stream per start index.
HittingSample sample_hitting_times(const System& s, const TargetSet& u, std::span<const Point> starts,
                                   std::uint64_t cap, std::uint64_t seed, unsigned threads = 0);

// Exact masses of V_k = {x in U : tau = k} and U_k = {x : tau = k}, stored as
// point counts out of N.
struct ReturnDecomposition {
  std::uint64_t n_points = 0;
  std::uint64_t u_size = 0;
  std::map<std::uint64_t, std::uint64_t> v_counts;
  std::map<std::uint64_t, std::uint64_t> u_counts;

  Rational mu_u() const { return Rational(u_size, n_points); }
  Rational mu_v(std::uint64_t k) const;
  Rational mu_uk(std::uint64_t k) const;
  std::uint64_t max_tau() const;
};

ReturnDecomposition decompose_exact(const System& s, const TargetSet& u);

struct DecompositionCheck {
  Rational v_total;     // sum mu(V_k), should be mu(U)
  Rational u_total;     // sum mu(U_k), should be 1
  Rational kac_sum;     // sum k mu(V_k), should be 1
  bool tails = true;    // mu(U_k) = sum_{j >= k} mu(V_j) for every k
  bool monotone = true; // mu(U_k) nonincreasing in k
  Rational mu_u;

  bool ok() const { return tails && monotone && v_total == mu_u && u_total == 1 && kac_sum == 1; }
};

DecompositionCheck check_decomposition(const ReturnDecomposition& d);

// F_U, Ftilde_U and the interpolant bar F_U (linear between the nodes
// k mu(U), equal to F_U there), in exact arithmetic.
struct ExactLaws {
  StepFn<Rational> hitting;
  StepFn<Rational> returns;
  PLConcaveFn<Rational> interpolant;
};

ExactLaws exact_laws(const ReturnDecomposition& d);

struct StarReport {
  Rational mu_u;
  // Largest deviation in: bar F'+ = 1 - Ftilde on each [k mu, (k+1) mu);
  // jump of F_U at k mu = mu(U_k); slope of bar F on [k mu, (k+1) mu) =
  // mu(U_{k+1}) / mu(U).
  Rational max_violation;
  // sup |F_U - bar F_U|, bounded by mu(U).
  Rational sup_gap;

  bool gap_within_bound() const { return sup_gap <= mu_u; }
  bool gap_attains_bound() const { return sup_gap == mu_u; }
  bool ok() const { return max_violation == 0 && gap_within_bound(); }
};

StarReport verify_star_identities(const ReturnDecomposition& d);

struct EmpiricalDistributions {
  StepFn<double> hitting;        // F_U over all starts
  StepFn<double> returns;        // Ftilde_U over starts in U
  PLConcaveFn<double> interpolant;  // bar F_U
  double mu_u = 0;
  double kac = 0;     // mean of mu(U) tau over starts in U that returned
  double nothit = 0;  // fraction of starts not hit within the cap
  std::uint64_t cap = 0;
  std::size_t u_starts = 0;
  bool extended_tail = false;
};

// Throws SamplingError("empty conditional sample") when no start lands in U.
EmpiricalDistributions empirical_distributions(const System& s, const TargetSet& u, std::size_t m,
                                               std::uint64_t seed, double cap_factor = 50.0,
                                               unsigned threads = 0);

struct DirectReturnSample {
  StepFn<double> returns;
  double kac = 0;
  double nothit = 0;
  std::uint64_t draws = 0;
  std::uint64_t accepted = 0;
  bool extended_tail = false;

  double acceptance_rate() const {
    return draws == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(draws);
  }
};

// Ftilde_U from m starts inside U found by rejection sampling (an exhaustive
// sweep of U on finite systems when m >= |U|).
DirectReturnSample direct_return_sample(const System& s, const TargetSet& u, std::size_t m,
                                        std::uint64_t seed, std::uint64_t cap,
                                        std::uint64_t max_draws = 1'000'000'000ULL,
                                        unsigned threads = 0);

struct RunManifest {
  std::string system;
  std::string set;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double cap_factor = 0;
  std::uint64_t cap = 0;
  double mu_u = 0;
  double nothit = 0;
  double kac = 0;
  std::string return_estimator;
  bool extended_tail = false;
};

std::string manifest_json(const RunManifest& manifest);

// <dir>/{F.csv, Ftilde.csv, barF.csv, manifest.json}
void write_run(const std::filesystem::path& dir, const EmpiricalDistributions& result,
               const RunManifest& manifest);

}  // namespace hitreturn
