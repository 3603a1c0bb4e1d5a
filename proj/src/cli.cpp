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

#include "hitreturn/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hitreturn/csv.hpp"
#include "hitreturn/error.hpp"
#include "hitreturn/experiment.hpp"

namespace hitreturn {

namespace {

void print_report(std::ostream& out, const std::string& label, const char* cls, const ClassReport& report) {
  if (report.member()) {
    out << label << ": in class " << cls << "\n";
    return;
  }
  out << label << ": not in class " << cls << (report.indeterminate ? " (integral indeterminate)" : "") << "\n";
  for (const auto& v : report.violations) {
    out << "  " << v.rule << " at t=" << format_real(v.witness) << " by " << format_real(v.magnitude) << "\n";
  }
}

// Writes to `path`, or to `out` when the path is empty or "-".
template <class Fn>
void emit_csv(const std::string& path, std::ostream& out, const Fn& f) {
  if (path.empty() || path == "-") {
    write_csv(out, f);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::invalid_argument, "cannot write " + path);
  write_csv(file, f);
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::parse:
    case ErrorKind::invalid_argument:
      return 2;
    case ErrorKind::precision_exhausted:
    case ErrorKind::rational_detected:
      return 3;
    case ErrorKind::sampling:
      return 4;
  }
  return 1;
}

const char* category(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::parse:
      return "parse error";
    case ErrorKind::invalid_argument:
      return "invalid input";
    case ErrorKind::precision_exhausted:
      return "precision exhausted";
    case ErrorKind::rational_detected:
      return "rational rotation number";
    case ErrorKind::sampling:
      return "sampling failure";
  }
  return "error";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hitting and return time statistics for dynamical systems", "hitreturn"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment described by a key=value config file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> cap_factor;
  std::optional<std::string> grid;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  std::optional<std::string> return_sampling;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--seed", seed, "Override the seed");
  run->add_option("--samples", samples, "Override the number of sampled starts");
  run->add_option("--cap-factor", cap_factor, "Override cap = ceil(cap_factor / mu(U))");
  run->add_option("--grid", grid, "Override the evaluation grid, start:stop:step");
  run->add_option("--out", out_dir, "Override the output directory");
  run->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");
  run->add_option("--return-sampling", return_sampling, "reuse or direct");

  // transform
  auto* transform = app.add_subcommand("transform", "Apply the duality transform to a CSV function");
  std::string direction;
  std::string transform_in;
  std::string transform_out;
  transform->add_option("direction", direction, "forward (return law -> hitting law) or inverse")
      ->required()
      ->check(CLI::IsMember({"forward", "inverse"}));
  transform->add_option("input", transform_in, "Input CSV")->required();
  transform->add_option("output", transform_out, "Output CSV (default: standard output)");

  // law
  auto* law = app.add_subcommand("law", "Write a closed-form limit law as CSV");
  std::string law_spec;
  std::string law_out;
  law->add_option("spec", law_spec, "exp[:grid=h,horizon=H] | uniform-hitting | cf-hitting:t,w | cf-return:t,w")
      ->required();
  law->add_option("output", law_out, "Output CSV (default: standard output)");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a CSV function against its class");
  std::string validate_in;
  std::string kind = "step";
  std::optional<double> tail_bound;
  validate->add_option("csv", validate_in, "Input CSV")->required();
  validate->add_option("--kind", kind, "step (return law) or pl (hitting law)")
      ->check(CLI::IsMember({"step", "pl"}));
  validate->add_option("--tail-bound", tail_bound,
                       "Upper bound on the integral of 1 - F beyond the last breakpoint");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      ExperimentConfig config = read_config_file(config_path);
      if (seed) config.seed = *seed;
      if (samples) config.samples = *samples;
      if (cap_factor) config.cap_factor = *cap_factor;
      if (grid) config.grid = parse_grid(*grid);
      if (out_dir) config.out = *out_dir;
      if (threads) config.threads = *threads;
      if (return_sampling) {
        if (*return_sampling == "reuse") {
          config.return_sampling = ReturnSampling::reuse;
        } else if (*return_sampling == "direct") {
          config.return_sampling = ReturnSampling::direct;
        } else {
          throw ParseError("--return-sampling is reuse or direct");
        }
      }
      const ExperimentResult result = run_experiment(config);
      write_summary(out, result);
      err << "wrote " << result.dir.string() << "\n";
      return 0;
    }

    if (*transform) {
      // Reports go wherever the CSV does not.
      std::ostream& info = (transform_out.empty() || transform_out == "-") ? err : out;
      if (direction == "forward") {
        const StepFn<double> in = read_step_csv_file(transform_in);
        print_report(info, "input", "Ftilde", validate_class_Ftilde(in));
        const PLConcaveFn<double> result = forward_transform(in);
        print_report(info, "output", "F", validate_class_F(result));
        emit_csv(transform_out, out, LawFunction(result));
      } else {
        const PLConcaveFn<double> in = read_pl_csv_file(transform_in);
        print_report(info, "input", "F", validate_class_F(in));
        const StepFn<double> result = inverse_transform(in);
        print_report(info, "output", "Ftilde", validate_class_Ftilde(result));
        emit_csv(transform_out, out, LawFunction(result));
      }
      return 0;
    }

    if (*law) {
      const LawSpec spec = parse_law(law_spec);
      emit_csv(law_out, out, make_law(spec.law, spec.grid));
      return 0;
    }

    if (*validate) {
      ClassReport report;
      if (kind == "pl") {
        report = validate_class_F(read_pl_csv_file(validate_in));
        print_report(out, validate_in, "F", report);
      } else {
        report = validate_class_Ftilde(read_step_csv_file(validate_in), tail_bound);
        print_report(out, validate_in, "Ftilde", report);
      }
      return report.member() ? 0 : 1;
    }
  } catch (const PrecisionExhausted& e) {
    err << "precision exhausted: " << e.what() << " (reached step " << e.reached() << ")\n";
    return 3;
  } catch (const Error& e) {
    err << category(e) << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hitreturn
