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

// CSV form of distribution functions: header `t,value`, one row per
// breakpoint (step functions, value at the breakpoint) or knot
// (piecewise-linear functions), 17 significant digits. A piecewise-linear
// function that keeps growing past its last knot gets one extra row
// `inf,<tail slope>`.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "hitreturn/distfn.hpp"

namespace hitreturn {

std::string format_real(double v);
double parse_real(std::string_view text);

void write_csv(std::ostream& out, const StepFn<double>& f);
void write_csv(std::ostream& out, const PLConcaveFn<double>& f);
void write_csv(std::ostream& out, const LawFunction& f);

StepFn<double> read_step_csv(std::istream& in);
PLConcaveFn<double> read_pl_csv(std::istream& in);

void write_csv_file(const std::filesystem::path& path, const LawFunction& f);
StepFn<double> read_step_csv_file(const std::filesystem::path& path);
PLConcaveFn<double> read_pl_csv_file(const std::filesystem::path& path);

}  // namespace hitreturn
