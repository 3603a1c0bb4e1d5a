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

#include "hitreturn/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hitreturn/csv.hpp"
#include "hitreturn/error.hpp"
#include "hitreturn/fixed_point.hpp"

namespace hitreturn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits on `sep`, ignoring separators inside [...] (digit lists).
std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
    if (s[i] == sep && depth == 0) {
      parts.push_back(trim(s.substr(begin, i - begin)));
      begin = i + 1;
    }
  }
  parts.push_back(trim(s.substr(begin)));
  return parts;
}

template <class Int>
Int parse_int(std::string_view text, const char* what) {
  text = trim(text);
  Int v{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw ParseError(std::string("bad ") + what + ": '" + std::string(text) + "'");
  }
  return v;
}

std::pair<std::string_view, std::string_view> head(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return {trim(text), {}};
  return {trim(text.substr(0, colon)), trim(text.substr(colon + 1))};
}

std::vector<std::string_view> arguments(std::string_view body, std::size_t count, std::string_view spec) {
  auto parts = split(body, ',');
  if (parts.size() != count || std::any_of(parts.begin(), parts.end(), [](auto p) { return p.empty(); })) {
    throw ParseError("expected " + std::to_string(count) + " comma-separated values in '" + std::string(spec) +
                     "'");
  }
  return parts;
}

// A point of the circle given as a decimal, double or digit list in [0, 1].
std::uint64_t parse_circle_point(std::string_view text) { return Alpha::parse(text).fixed64(); }

double parse_parameter(std::string_view text) {
  text = trim(text);
  if (text == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
  if (text.substr(0, 3) == "cf:") return static_cast<double>(Alpha::parse(text).approx());
  return parse_real(text);
}

}  // namespace

SystemSpec parse_system(std::string_view text) {
  const auto [kind, body] = head(text);
  SystemSpec spec{std::string(trim(text)), Doubling{}, std::nullopt};
  if (kind == "finite") {
    const auto args = arguments(body, 2, text);
    spec.system = FiniteRotation(parse_int<std::uint64_t>(args[0], "N"), parse_int<std::int64_t>(args[1], "r"));
  } else if (kind == "rot") {
    if (body.empty()) throw ParseError("rot: needs a rotation number, e.g. rot:cf:[1]*");
    Alpha alpha = Alpha::parse(body);
    spec.system = CircleRotation(alpha);
    spec.alpha = std::move(alpha);
  } else if (kind == "doubling") {
    if (!body.empty()) throw ParseError("doubling takes no parameters");
  } else {
    throw ParseError("unknown system '" + std::string(text) + "' (finite:N,r | rot:<alpha> | doubling)");
  }
  return spec;
}

TargetSet parse_set(std::string_view text, const SystemSpec& system) {
  const auto [kind, body] = head(text);
  TargetSet set = DyadicCell(0, 0);
  if (kind == "subset") {
    const auto* f = std::get_if<FiniteRotation>(&system.system);
    if (f == nullptr) throw ParseError("subset: sets need a finite system");
    std::vector<std::uint64_t> residues;
    for (auto part : split(body, ',')) residues.push_back(parse_int<std::uint64_t>(part, "residue"));
    set = Subset(f->size(), std::move(residues));
  } else if (kind == "arc") {
    const auto args = arguments(body, 2, text);
    set = CircleArc{parse_circle_point(args[0]), parse_circle_point(args[1])};
  } else if (kind == "dyadic") {
    const auto args = arguments(body, 2, text);
    set = DyadicCell(parse_int<unsigned>(args[0], "depth"), parse_int<std::uint64_t>(args[1], "index"));
  } else if (kind == "jn") {
    if (!system.alpha) throw ParseError("jn: sets need a rotation system rot:<alpha>");
    const auto args = arguments(body, 2, text);
    set = renormalization_interval(*system.alpha, parse_circle_point(args[0]),
                                   parse_int<std::size_t>(args[1], "n"));
  } else {
    throw ParseError("unknown set '" + std::string(text) + "' (subset:.. | arc:a,b | dyadic:k,i | jn:z,n)");
  }
  check_compatible(system.system, set);
  return set;
}

LawSpec parse_law(std::string_view text) {
  const auto [kind, body] = head(text);
  LawSpec spec;
  if (kind == "exp") {
    spec.law = LimitLaw::exponential();
    if (!body.empty()) {
      for (auto item : split(body, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError("exp options look like grid=0.001,horizon=20");
        const auto key = trim(item.substr(0, eq));
        const double value = parse_real(trim(item.substr(eq + 1)));
        if (key == "grid") {
          spec.grid.step = value;
        } else if (key == "horizon") {
          spec.grid.horizon = value;
        } else {
          throw ParseError("unknown exp option '" + std::string(key) + "'");
        }
      }
    }
  } else if (kind == "uniform-hitting") {
    if (!body.empty()) throw ParseError("uniform-hitting takes no parameters");
    spec.law = LimitLaw::uniform_hitting();
  } else if (kind == "cf-hitting" || kind == "cf-return") {
    const auto args = arguments(body, 2, text);
    const double theta = parse_parameter(args[0]);
    const double omega = parse_parameter(args[1]);
    spec.law = kind == "cf-hitting" ? LimitLaw::cf_hitting(theta, omega) : LimitLaw::cf_return(theta, omega);
  } else {
    throw ParseError("unknown law '" + std::string(text) +
                     "' (exp | uniform-hitting | cf-hitting:theta,omega | cf-return:theta,omega)");
  }
  return spec;
}

std::vector<double> GridSpec::points() const {
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

GridSpec parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ParseError("grid looks like start:stop:step, got '" + std::string(text) + "'");
  GridSpec g{parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2])};
  if (!(g.step > 0)) throw ParseError("grid step must be positive");
  if (!(g.stop >= g.start)) throw ParseError("grid stop must not precede its start");
  if ((g.stop - g.start) / g.step > 1e8) throw ParseError("grid has more than 1e8 points");
  return g;
}

void ExperimentConfig::validate() const {
  if (system.empty()) throw ParseError("config: 'system' is required");
  if (sets.empty()) throw ParseError("config: at least one 'set' is required");
  if (samples < 1) throw ParseError("config: samples must be at least 1");
  if (!(cap_factor > 0)) throw ParseError("config: cap_factor must be positive");
  if (!(grid.step > 0)) throw ParseError("config: grid step must be positive");
  if (!(grid.stop >= grid.start)) throw ParseError("config: grid stop must not precede its start");
  if (name.empty() || name.find('/') != std::string::npos) throw ParseError("config: bad name '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (key == "name") {
      c.name = value;
    } else if (key == "system") {
      c.system = value;
    } else if (key == "set") {
      c.sets.emplace_back(value);
    } else if (key == "samples") {
      c.samples = parse_int<std::size_t>(value, "samples");
    } else if (key == "seed") {
      c.seed = parse_int<std::uint64_t>(value, "seed");
    } else if (key == "cap_factor") {
      c.cap_factor = parse_real(value);
    } else if (key == "reference_law") {
      c.reference_law = std::string(value);
    } else if (key == "grid") {
      c.grid = parse_grid(value);
    } else if (key == "out") {
      c.out = std::string(value);
    } else if (key == "return_sampling") {
      if (value == "reuse") {
        c.return_sampling = ReturnSampling::reuse;
      } else if (value == "direct") {
        c.return_sampling = ReturnSampling::direct;
      } else {
        throw ParseError("return_sampling is reuse or direct");
      }
    } else if (key == "threads") {
      c.threads = parse_int<unsigned>(value, "threads");
    } else {
      throw ParseError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  return parse_config(in);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const SystemSpec system = parse_system(config.system);
  std::vector<TargetSet> sets;
  for (const auto& s : config.sets) sets.push_back(parse_set(s, system));
  std::optional<LimitLaw> reference;
  if (config.reference_law) reference = parse_law(*config.reference_law).law;
  const std::vector<double> grid = config.grid.points();
  const std::span<const double> g(grid);

  ExperimentResult result;
  result.dir = config.out / config.name;
  std::filesystem::create_directories(result.dir);

  for (std::size_t i = 0; i < sets.size(); ++i) {
    const TargetSet& u = sets[i];
    EmpiricalDistributions dist =
        empirical_distributions(system.system, u, config.samples, config.seed, config.cap_factor, config.threads);
    if (config.return_sampling == ReturnSampling::direct) {
      const DirectReturnSample direct = direct_return_sample(system.system, u, config.samples, config.seed,
                                                             dist.cap, 1'000'000'000ULL, config.threads);
      dist.returns = direct.returns;
      dist.kac = direct.kac;
      dist.extended_tail |= direct.extended_tail;
    }

    SetResult r{config.sets[i], dist, 0.0, std::nullopt, std::nullopt};
    r.duality_dist = grid_sup_distance<double>(dist.hitting, forward_transform(dist.returns), g);
    if (reference) {
      r.law_dist_F = grid_sup_distance<double>(
          dist.hitting, [&](double t) { return reference->hitting_cdf(t); }, g);
      r.law_dist_Ftilde = grid_sup_distance<double>(
          dist.returns, [&](double t) { return reference->return_cdf(t); }, g);
    }

    RunManifest manifest;
    manifest.system = system.text;
    manifest.set = config.sets[i];
    manifest.seed = config.seed;
    manifest.samples = config.samples;
    manifest.cap_factor = config.cap_factor;
    manifest.cap = dist.cap;
    manifest.mu_u = dist.mu_u;
    manifest.nothit = dist.nothit;
    manifest.kac = dist.kac;
    manifest.return_estimator = config.return_sampling == ReturnSampling::direct ? "direct" : "reuse";
    manifest.extended_tail = dist.extended_tail;
    write_run(result.dir / std::to_string(i + 1), dist, manifest);
    result.sets.push_back(std::move(r));
  }

  {
    std::ofstream out(result.dir / "summary.csv", std::ios::binary);
    write_summary(out, result);
  }
  {
    std::ofstream out(result.dir / "plot.svg", std::ios::binary);
    write_svg(out, config, result);
  }
  return result;
}

void write_summary(std::ostream& out, const ExperimentResult& result) {
  out << "set,mu,kac,nothit,duality_dist,law_dist_F,law_dist_Ftilde\n";
  for (std::size_t i = 0; i < result.sets.size(); ++i) {
    const SetResult& r = result.sets[i];
    out << (i + 1) << ',' << format_real(r.dist.mu_u) << ',' << format_real(r.dist.kac) << ','
        << format_real(r.dist.nothit) << ',' << format_real(r.duality_dist) << ','
        << (r.law_dist_F ? format_real(*r.law_dist_F) : "") << ','
        << (r.law_dist_Ftilde ? format_real(*r.law_dist_Ftilde) : "") << '\n';
  }
}

// --- SVG ----------------------------------------------------------------------

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 70, kRight = 200, kTop = 30, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

struct Frame {
  double lo, hi;
  double x(double t) const { return kLeft + (t - lo) / (hi - lo) * (kWidth - kLeft - kRight); }
  double y(double v) const { return kTop + (1.0 - v) * (kHeight - kTop - kBottom); }
};

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

using Path = std::vector<std::pair<double, double>>;

Path step_path(const StepFn<double>& f, double lo, double hi) {
  Path p{{lo, f(lo)}};
  for (const auto& b : f.breakpoints()) {
    if (b.t <= lo || b.t > hi) continue;
    p.push_back({b.t, f.left_limit(b.t)});
    p.push_back({b.t, b.value});
  }
  p.push_back({hi, f(hi)});
  return p;
}

template <class F>
Path sampled_path(const F& f, double lo, double hi) {
  Path p;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    p.push_back({t, f(t)});
  }
  return p;
}

void polyline(std::ostream& out, const Frame& fr, const Path& p, const char* color, bool dashed) {
  out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (dashed) out << " stroke-dasharray=\"6 4\"";
  out << " points=\"";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << (i ? " " : "") << num(fr.x(p[i].first)) << ',' << num(fr.y(std::clamp(p[i].second, 0.0, 1.0)));
  }
  out << "\"/>\n";
}

void legend_entry(std::ostream& out, int row, const char* color, bool dashed, const std::string& label) {
  const double y = kTop + 10 + row * 20;
  const double x = kWidth - kRight + 20;
  out << "  <line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 30) << "\" y2=\"" << num(y)
      << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "")
      << "/>\n";
  out << "  <text x=\"" << num(x + 38) << "\" y=\"" << num(y + 4) << "\" font-size=\"12\">" << label
      << "</text>\n";
}

}  // namespace

void write_svg(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result) {
  Frame fr{config.grid.start, config.grid.stop};
  if (!(fr.hi > fr.lo)) fr.hi = fr.lo + 1.0;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
  out << "  <rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "  <text x=\"" << num(kLeft) << "\" y=\"20\" font-size=\"14\">" << config.name
      << ": F (solid) and return law (dashed)</text>\n";
  // axes and ticks
  out << "  <g stroke=\"black\" stroke-width=\"1\">\n";
  out << "    <line x1=\"" << num(fr.x(fr.lo)) << "\" y1=\"" << num(fr.y(0)) << "\" x2=\"" << num(fr.x(fr.hi))
      << "\" y2=\"" << num(fr.y(0)) << "\"/>\n";
  out << "    <line x1=\"" << num(fr.x(fr.lo)) << "\" y1=\"" << num(fr.y(0)) << "\" x2=\"" << num(fr.x(fr.lo))
      << "\" y2=\"" << num(fr.y(1)) << "\"/>\n";
  out << "  </g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = k / 4.0;
    out << "  <text x=\"" << num(kLeft - 40) << "\" y=\"" << num(fr.y(v) + 4) << "\" font-size=\"11\">"
        << num(v) << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double t = fr.lo + (fr.hi - fr.lo) * k / 5.0;
    out << "  <text x=\"" << num(fr.x(t) - 10) << "\" y=\"" << num(fr.y(0) + 20) << "\" font-size=\"11\">"
        << num(t) << "</text>\n";
  }
  out << "  <text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" font-size=\"12\">t = mu(U) tau</text>\n";

  int row = 0;
  if (config.reference_law) {
    const LimitLaw law = parse_law(*config.reference_law).law;
    polyline(out, fr, sampled_path([&](double t) { return law.hitting_cdf(t); }, fr.lo, fr.hi), "black", false);
    Path ret;
    if (law.kind == LimitLaw::Kind::exponential) {
      ret = sampled_path([&](double t) { return law.return_cdf(t); }, fr.lo, fr.hi);
    } else {
      const LawFunction hitting = make_law(law.kind == LimitLaw::Kind::uniform_hitting
                                               ? law
                                               : LimitLaw::cf_hitting(law.theta, law.omega));
      ret = step_path(inverse_transform(std::get<PLConcaveFn<double>>(hitting)), fr.lo, fr.hi);
    }
    polyline(out, fr, ret, "black", true);
    legend_entry(out, row++, "black", false, "reference F");
    legend_entry(out, row++, "black", true, "reference return");
  }
  for (std::size_t i = 0; i < result.sets.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    polyline(out, fr, step_path(result.sets[i].dist.hitting, fr.lo, fr.hi), color, false);
    polyline(out, fr, step_path(result.sets[i].dist.returns, fr.lo, fr.hi), color, true);
    legend_entry(out, row++, color, false, "U_" + std::to_string(i + 1));
  }
  out << "</svg>\n";
}

}  // namespace hitreturn
