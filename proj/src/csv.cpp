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

#include "hitreturn/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

namespace hitreturn {

std::string format_real(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

double parse_real(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::vector<std::pair<double, double>> read_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,value") throw ParseError("expected header 't,value', got '" + line + "'");

  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected two fields");
    }
    const std::string_view view(line);
    rows.emplace_back(parse_real(view.substr(0, comma)), parse_real(view.substr(comma + 1)));
  }
  return rows;
}

template <class Fn>
auto structural(Fn&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_argument) throw ParseError(e.what());
    throw;
  }
}

}  // namespace

void write_csv(std::ostream& out, const StepFn<double>& f) {
  out << "t,value\n";
  for (const auto& b : f.breakpoints()) out << format_real(b.t) << ',' << format_real(b.value) << '\n';
}

void write_csv(std::ostream& out, const PLConcaveFn<double>& f) {
  out << "t,value\n";
  for (const auto& k : f.knots()) out << format_real(k.t) << ',' << format_real(k.y) << '\n';
  if (f.tail_slope() != 0.0) out << "inf," << format_real(f.tail_slope()) << '\n';
}

void write_csv(std::ostream& out, const LawFunction& f) {
  std::visit([&](const auto& fn) { write_csv(out, fn); }, f);
}

StepFn<double> read_step_csv(std::istream& in) {
  auto rows = read_rows(in);
  std::vector<Breakpoint<double>> points;
  points.reserve(rows.size());
  for (const auto& [t, v] : rows) {
    if (!std::isfinite(t)) throw ParseError("step function rows need finite t");
    points.push_back({t, v});
  }
  return structural([&] { return StepFn<double>(std::move(points)); });
}

PLConcaveFn<double> read_pl_csv(std::istream& in) {
  auto rows = read_rows(in);
  double tail = 0.0;
  if (!rows.empty() && std::isinf(rows.back().first)) {
    tail = rows.back().second;
    rows.pop_back();
  }
  std::vector<Knot<double>> knots;
  knots.reserve(rows.size());
  for (const auto& [t, y] : rows) knots.push_back({t, y});
  return structural([&] { return PLConcaveFn<double>(std::move(knots), tail); });
}

void write_csv_file(const std::filesystem::path& path, const LawFunction& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + path.string());
  write_csv(out, f);
}

StepFn<double> read_step_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_step_csv(in);
}

PLConcaveFn<double> read_pl_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_pl_csv(in);
}

}  // namespace hitreturn
