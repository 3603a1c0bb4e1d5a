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

#include "hitreturn/hitstat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "hitreturn/csv.hpp"
#include "hitreturn/parallel.hpp"
#include "hitreturn/random.hpp"

namespace hitreturn {

double HittingSample::nothit_fraction() const {
  if (records.empty()) return 0.0;
  std::size_t missed = 0;
  for (const auto& r : records) missed += r.tau ? 0 : 1;
  return static_cast<double>(missed) / static_cast<double>(records.size());
}

std::uint64_t cap_for(double mu, double cap_factor) {
  if (!(mu > 0.0) || !(cap_factor > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "cap needs mu(U) > 0 and cap_factor > 0");
  }
  const double cap = std::ceil(cap_factor / mu);
  if (cap >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(cap));
}

double normalized_time(const TargetSet& u, std::uint64_t tau) {
  if (const auto* sub = std::get_if<Subset>(&u)) {
    const unsigned __int128 num = static_cast<unsigned __int128>(tau) * sub->size();
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(sub->modulus()));
  }
  if (const auto* arc = std::get_if<CircleArc>(&u)) {
    const unsigned __int128 num = static_cast<unsigned __int128>(tau) * arc->length_fixed();
    return static_cast<double>(std::ldexp(static_cast<long double>(num), -64));
  }
  return std::ldexp(static_cast<double>(tau), -static_cast<int>(std::get<DyadicCell>(u).depth()));
}

namespace {

template <class Step, class In>
std::optional<std::uint64_t> scan(std::uint64_t x, std::uint64_t cap, Step step, In in) {
  for (std::uint64_t k = 1; k <= cap; ++k) {
    x = step(x);
    if (in(x)) return k;
  }
  return std::nullopt;
}

// Bits of the start point that a membership test at step k needs: the cell
// depth for dyadic cells, 40 bits of position for arcs.
unsigned bits_needed(const TargetSet& u) {
  if (const auto* c = std::get_if<DyadicCell>(&u)) return c->depth();
  return 40;
}

struct HitOutcome {
  std::optional<std::uint64_t> tau;
  bool extended = false;
};

// Doubling map on an unbounded bit string: the top 64 bits of a 128-bit
// window are T^k x; the low half is refilled from `tail` every 64 shifts.
template <class In>
HitOutcome doubling_extended(std::uint64_t x, std::uint64_t cap, unsigned needed, SplitMix64& tail,
                             In in) {
  unsigned __int128 window = (static_cast<unsigned __int128>(x) << 64) | tail();
  unsigned fresh = 64;
  for (std::uint64_t k = 1; k <= cap; ++k) {
    window <<= 1;
    if (--fresh == 0) {
      window |= tail();
      fresh = 64;
    }
    if (in(static_cast<std::uint64_t>(window >> 64))) return {k, k + needed > 64};
  }
  return {std::nullopt, cap + needed > 64};
}

template <class In>
HitOutcome hit_with(const System& s, std::uint64_t x, std::uint64_t cap, unsigned needed,
                    SplitMix64* tail, In in) {
  if (const auto* f = std::get_if<FiniteRotation>(&s)) {
    const std::uint64_t n = f->size();
    const std::uint64_t r = f->shift();
    return {scan(x, cap, [=](std::uint64_t y) {
                   const std::uint64_t z = y + r;
                   return (z < y || z >= n) ? z - n : z;
                 }, in)};
  }
  if (const auto* rot = std::get_if<CircleRotation>(&s)) {
    const std::uint64_t a = rot->alpha();
    return {scan(x, cap, [=](std::uint64_t y) { return y + a; }, in)};
  }
  if (tail != nullptr) return doubling_extended(x, cap, needed, *tail, in);
  const std::uint64_t usable = needed >= 64 ? 0 : 64 - needed;
  for (std::uint64_t k = 1; k <= cap; ++k) {
    if (k > usable) {
      throw PrecisionExhausted("doubling map: the start point has no bits left for step " + std::to_string(k),
                               k - 1);
    }
    if (in(x << k)) return {k};
  }
  return {};
}

HitOutcome hit(const System& s, const TargetSet& u, std::uint64_t x, std::uint64_t cap, SplitMix64* tail) {
  const unsigned needed = bits_needed(u);
  return std::visit([&](const auto& set) {
    return hit_with(s, x, cap, needed, tail, [&set](std::uint64_t y) { return set.contains(y); });
  }, u);
}

}  // namespace

std::optional<std::uint64_t> hitting_time(const System& s, const TargetSet& u, Point x, std::uint64_t cap) {
  check_compatible(s, u);
  if (cap == 0) throw Error(ErrorKind::invalid_argument, "cap must be at least 1");
  return hit(s, u, x.value, cap, nullptr).tau;
}

HittingSample sample_hitting_times(const System& s, const TargetSet& u, std::span<const Point> starts,
                                   std::uint64_t cap, std::uint64_t seed, unsigned threads) {
  check_compatible(s, u);
  if (cap == 0) throw Error(ErrorKind::invalid_argument, "cap must be at least 1");
  HittingSample sample;
  sample.mu_u = measure(u);
  sample.cap = cap;
  sample.records.resize(starts.size());
  std::vector<char> extended(starts.size(), 0);
  const bool doubling = std::holds_alternative<Doubling>(s);

  parallel_for(starts.size(), threads, [&](std::size_t i) {
    SplitMix64 tail(stream_seed(seed, i));
    const HitOutcome out = hit(s, u, starts[i].value, cap, doubling ? &tail : nullptr);
    sample.records[i] = {i, out.tau, contains(u, starts[i])};
    extended[i] = out.extended ? 1 : 0;
  });
  for (char e : extended) sample.extended_tail |= e != 0;
  return sample;
}

// --- Exact decomposition -----------------------------------------------------

Rational ReturnDecomposition::mu_v(std::uint64_t k) const {
  auto it = v_counts.find(k);
  return it == v_counts.end() ? Rational(0) : Rational(it->second, n_points);
}

Rational ReturnDecomposition::mu_uk(std::uint64_t k) const {
  auto it = u_counts.find(k);
  return it == u_counts.end() ? Rational(0) : Rational(it->second, n_points);
}

std::uint64_t ReturnDecomposition::max_tau() const {
  return u_counts.empty() ? 0 : u_counts.rbegin()->first;
}

ReturnDecomposition decompose_exact(const System& s, const TargetSet& u) {
  const auto* f = std::get_if<FiniteRotation>(&s);
  const auto* sub = std::get_if<Subset>(&u);
  if (f == nullptr || sub == nullptr) {
    throw Error(ErrorKind::invalid_argument, "exact decomposition needs a finite rotation and a residue subset");
  }
  check_compatible(s, u);

  const std::uint64_t n = f->size();
  // gcd(r, N) = 1: 0, r, 2r, ... visits every residue once.
  std::vector<std::uint64_t> orbit(n);
  std::uint64_t x = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    orbit[i] = x;
    x = step(s, Point{x}).value;
  }

  ReturnDecomposition d;
  d.n_points = n;
  d.u_size = sub->size();
  // Walking the cycle backwards twice, `next` is the orbit position of the
  // first visit to U strictly after position i.
  std::uint64_t next = 0;
  bool seen = false;
  for (std::uint64_t j = 2 * n; j-- > 0;) {
    const std::uint64_t i = j % n;
    if (j < n) {
      const std::uint64_t tau = next - j;
      ++d.u_counts[tau];
      if (sub->contains(orbit[i])) ++d.v_counts[tau];
    }
    if (sub->contains(orbit[i])) {
      next = j;
      seen = true;
    }
  }
  (void)seen;
  return d;
}

DecompositionCheck check_decomposition(const ReturnDecomposition& d) {
  DecompositionCheck c;
  c.mu_u = d.mu_u();
  for (const auto& [k, count] : d.v_counts) {
    const Rational mass(count, d.n_points);
    c.v_total += mass;
    c.kac_sum += Rational(k) * mass;
  }
  for (const auto& [k, count] : d.u_counts) c.u_total += Rational(count, d.n_points);

  const std::uint64_t top = std::max(d.max_tau(), d.v_counts.empty() ? 0 : d.v_counts.rbegin()->first);
  Rational tail(0);  // sum_{j >= k} mu(V_j), built from the top down
  Rational previous(0);
  for (std::uint64_t k = top + 1; k >= 1; --k) {
    tail += d.mu_v(k);
    const Rational uk = d.mu_uk(k);
    if (uk != tail) c.tails = false;
    if (k <= top && uk < previous) c.monotone = false;
    previous = uk;
  }
  return c;
}

ExactLaws exact_laws(const ReturnDecomposition& d) {
  const Rational mu = d.mu_u();
  const std::uint64_t top = d.max_tau();
  std::vector<Breakpoint<Rational>> hitting;
  std::vector<Breakpoint<Rational>> returns;
  std::vector<Knot<Rational>> knots{{Rational(0), Rational(0)}};
  std::uint64_t hit_total = 0;
  std::uint64_t return_total = 0;
  for (std::uint64_t k = 1; k <= top; ++k) {
    const Rational t = Rational(k) * mu;
    if (auto it = d.u_counts.find(k); it != d.u_counts.end()) {
      hit_total += it->second;
      hitting.push_back({t, Rational(hit_total, d.n_points)});
    }
    if (auto it = d.v_counts.find(k); it != d.v_counts.end()) {
      return_total += it->second;
      returns.push_back({t, Rational(return_total, d.u_size)});
    }
    knots.push_back({t, Rational(hit_total, d.n_points)});
  }
  return {StepFn<Rational>(std::move(hitting)), StepFn<Rational>(std::move(returns)),
          PLConcaveFn<Rational>(std::move(knots))};
}

StarReport verify_star_identities(const ReturnDecomposition& d) {
  const ExactLaws laws = exact_laws(d);
  StarReport report;
  report.mu_u = d.mu_u();
  const Rational& mu = report.mu_u;
  auto note = [&](const Rational& a, const Rational& b) {
    report.max_violation = std::max(report.max_violation, abs_of(Rational(a - b)));
  };

  const std::uint64_t top = d.max_tau();
  for (std::uint64_t k = 0; k <= top + 1; ++k) {
    const Rational t = Rational(k) * mu;
    const Rational slope = laws.interpolant.right_derivative(t);
    note(slope, Rational(1) - laws.returns(t));
    note(slope, d.mu_uk(k + 1) / mu);
    // The identity holds on the whole interval, not only at its left end.
    const Rational mid = t + mu / 2;
    note(laws.interpolant.right_derivative(mid), Rational(1) - laws.returns(mid));
    if (k >= 1) note(laws.hitting(t) - laws.hitting.left_limit(t), d.mu_uk(k));
  }
  report.sup_gap = exact_sup_distance(laws.hitting, laws.interpolant);
  return report;
}

// --- Empirical laws -----------------------------------------------------------

namespace {

StepFn<double> cdf_from_counts(const TargetSet& u, const std::map<std::uint64_t, std::uint64_t>& counts,
                               std::size_t denominator) {
  std::vector<Breakpoint<double>> points;
  points.reserve(counts.size());
  std::uint64_t running = 0;
  for (const auto& [tau, count] : counts) {
    running += count;
    points.push_back({normalized_time(u, tau),
                      static_cast<double>(running) / static_cast<double>(denominator)});
  }
  return StepFn<double>(std::move(points));
}

// Linear interpolation of F_U through (k mu, F_U(k mu)). Between jumps the
// interpolant is flat, so only the nodes k-1 and k around each jump matter.
PLConcaveFn<double> interpolant_from_counts(const TargetSet& u,
                                            const std::map<std::uint64_t, std::uint64_t>& counts,
                                            std::size_t denominator) {
  std::vector<Knot<double>> knots{{0.0, 0.0}};
  std::uint64_t running = 0;
  for (const auto& [tau, count] : counts) {
    const double before = static_cast<double>(running) / static_cast<double>(denominator);
    if (tau - 1 > 0 && knots.back().t < normalized_time(u, tau - 1)) {
      knots.push_back({normalized_time(u, tau - 1), before});
    }
    running += count;
    knots.push_back({normalized_time(u, tau), static_cast<double>(running) / static_cast<double>(denominator)});
  }
  return PLConcaveFn<double>(std::move(knots));
}

}  // namespace

EmpiricalDistributions empirical_distributions(const System& s, const TargetSet& u, std::size_t m,
                                               std::uint64_t seed, double cap_factor, unsigned threads) {
  check_compatible(s, u);
  const double mu = measure(u);
  const std::uint64_t cap = cap_for(mu, cap_factor);
  const std::vector<Point> starts = sample_points(s, m, seed);
  // Checked before any orbit is run: with no start in U there is nothing to
  // condition on, and a small U makes the cap huge.
  if (std::none_of(starts.begin(), starts.end(), [&](Point x) { return contains(u, x); })) {
    throw SamplingError("empty conditional sample: no start fell in U (" + describe(u) +
                        "); raise the sample size or use direct return sampling");
  }
  const HittingSample sample = sample_hitting_times(s, u, starts, cap, seed, threads);

  std::map<std::uint64_t, std::uint64_t> all;
  std::map<std::uint64_t, std::uint64_t> in_u;
  std::size_t u_starts = 0;
  std::size_t u_returned = 0;
  std::size_t missed = 0;
  double kac_sum = 0.0;
  for (const auto& r : sample.records) {
    if (r.from_u) ++u_starts;
    if (!r.tau) {
      ++missed;
      continue;
    }
    ++all[*r.tau];
    if (r.from_u) {
      ++in_u[*r.tau];
      ++u_returned;
      kac_sum += normalized_time(u, *r.tau);
    }
  }
  EmpiricalDistributions out;
  out.hitting = cdf_from_counts(u, all, starts.size());
  out.returns = cdf_from_counts(u, in_u, u_starts);
  out.interpolant = interpolant_from_counts(u, all, starts.size());
  out.mu_u = mu;
  out.kac = u_returned == 0 ? 0.0 : kac_sum / static_cast<double>(u_returned);
  out.nothit = static_cast<double>(missed) / static_cast<double>(starts.size());
  out.cap = cap;
  out.u_starts = u_starts;
  out.extended_tail = sample.extended_tail;
  return out;
}

DirectReturnSample direct_return_sample(const System& s, const TargetSet& u, std::size_t m,
                                        std::uint64_t seed, std::uint64_t cap, std::uint64_t max_draws,
                                        unsigned threads) {
  check_compatible(s, u);
  if (m == 0) throw Error(ErrorKind::invalid_argument, "sample size must be positive");

  DirectReturnSample out;
  std::vector<Point> starts;
  const auto* f = std::get_if<FiniteRotation>(&s);
  const auto* sub = std::get_if<Subset>(&u);
  if (f != nullptr && sub != nullptr && m >= sub->size()) {
    for (auto x : sub->residues()) starts.push_back({x});
    out.draws = starts.size();
  } else {
    Engine gen(seed);
    starts.reserve(m);
    while (starts.size() < m) {
      if (out.draws >= max_draws) {
        throw SamplingError("set too small for rejection sampling: " + std::to_string(starts.size()) +
                            " of " + std::to_string(m) + " starts found in " + std::to_string(out.draws) +
                            " draws");
      }
      const Point x{f != nullptr ? uniform_below(gen, f->size()) : gen()};
      ++out.draws;
      if (contains(u, x)) starts.push_back(x);
    }
  }
  out.accepted = starts.size();

  const HittingSample sample = sample_hitting_times(s, u, starts, cap, ~seed, threads);
  std::map<std::uint64_t, std::uint64_t> counts;
  std::size_t missed = 0;
  double kac_sum = 0.0;
  for (const auto& r : sample.records) {
    if (!r.tau) {
      ++missed;
      continue;
    }
    ++counts[*r.tau];
    kac_sum += normalized_time(u, *r.tau);
  }
  out.returns = cdf_from_counts(u, counts, starts.size());
  const std::size_t returned = starts.size() - missed;
  out.kac = returned == 0 ? 0.0 : kac_sum / static_cast<double>(returned);
  out.nothit = static_cast<double>(missed) / static_cast<double>(starts.size());
  out.extended_tail = sample.extended_tail;
  return out;
}

// --- Output -------------------------------------------------------------------

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["system"] = m.system;
  j["set"] = m.set;
  j["seed"] = m.seed;
  j["samples"] = m.samples;
  j["cap_factor"] = m.cap_factor;
  j["cap"] = m.cap;
  j["mu"] = m.mu_u;
  j["nothit"] = m.nothit;
  j["kac"] = m.kac;
  j["return_estimator"] = m.return_estimator;
  j["extended_precision_tail"] = m.extended_tail;
  return j.dump(2) + "\n";
}

void write_run(const std::filesystem::path& dir, const EmpiricalDistributions& result,
               const RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  write_csv_file(dir / "F.csv", result.hitting);
  write_csv_file(dir / "Ftilde.csv", result.returns);
  write_csv_file(dir / "barF.csv", result.interpolant);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest_json(manifest);
}

}  // namespace hitreturn
