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

// Experiment runner: textual specs for systems, target sets and limit laws,
// a flat key=value config, and the files a run leaves behind.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hitreturn/cfrac.hpp"
#include "hitreturn/distfn.hpp"
#include "hitreturn/dynsys.hpp"
#include "hitreturn/hitstat.hpp"

namespace hitreturn {

// A parsed system together with the rotation number it came from, which
// `jn:` set specs need.
struct SystemSpec {
  std::string text;
  System system;
  std::optional<Alpha> alpha;
};

// finite:N,r | rot:<alpha> | doubling
SystemSpec parse_system(std::string_view text);
// subset:0,1,... | arc:a,b | dyadic:k,i | jn:z,n
TargetSet parse_set(std::string_view text, const SystemSpec& system);

// exp[:grid=h,horizon=H] | uniform-hitting | cf-hitting:theta,omega |
// cf-return:theta,omega. Parameters are reals, `golden`, or cf:[...] lists.
struct LawSpec {
  LimitLaw law;
  ExpGrid grid;
};
LawSpec parse_law(std::string_view text);

// start:stop:step, stop included.
struct GridSpec {
  double start = 0.0;
  double stop = 5.0;
  double step = 0.01;

  std::vector<double> points() const;
};
GridSpec parse_grid(std::string_view text);

enum class ReturnSampling { reuse, direct };

struct ExperimentConfig {
  std::string name = "experiment";
  std::string system;
  std::vector<std::string> sets;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double cap_factor = 50.0;
  std::optional<std::string> reference_law;
  GridSpec grid;
  std::filesystem::path out = "out";
  ReturnSampling return_sampling = ReturnSampling::reuse;
  unsigned threads = 0;

  void validate() const;
};

// Lines `key = value`; `#` starts a comment; `set` may repeat.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig read_config_file(const std::filesystem::path& path);

struct SetResult {
  std::string set;
  EmpiricalDistributions dist;
  double duality_dist = 0;  // F against forward_transform(Ftilde), on the grid
  std::optional<double> law_dist_F;
  std::optional<double> law_dist_Ftilde;
};

struct ExperimentResult {
  std::vector<SetResult> sets;
  std::filesystem::path dir;  // <out>/<name>
};

// Runs every set in order and writes <out>/<name>/<index>/{F,Ftilde,barF}.csv
// plus manifest.json, <out>/<name>/summary.csv and <out>/<name>/plot.svg.
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_summary(std::ostream& out, const ExperimentResult& result);
void write_svg(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace hitreturn
