// Copyright 2026 The nlatten Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// nlatten command-line tool: run, sweep, preset, validate.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlatten/error.h"
#include "runner.h"
#include "scenario.h"

namespace {

using nlatten::Error;
using nlatten::ErrorKind;
namespace cli = nlatten::cli;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;
constexpr int kExitOther = 1;

int ExitCodeFor(const Error& e) {
  if (e.kind() == ErrorKind::kIoError) return kExitIo;
  if (e.is_numerical()) return kExitNumerical;
  return kExitValidation;
}

cli::Format ParseFormat(const std::string& name) {
  if (name == "csv") return cli::Format::kCsv;
  if (name == "json") return cli::Format::kJson;
  throw Error(ErrorKind::kValidationError, "--format must be csv or json");
}

struct RunFlags {
  std::string scenario_file;
  std::string out;
  std::string format = "csv";
  bool svg = false;
  std::string engine;
  std::optional<std::uint64_t> seed;
  std::optional<double> fixed_step;
  std::string rates;
  std::optional<double> alpha;
  std::optional<double> t_max;
  std::optional<int> nmax;
  std::optional<std::size_t> samples;
  std::optional<double> u1;
  std::optional<std::string> name;
};

cli::Scenario ResolveScenario(const RunFlags& f) {
  cli::Scenario s;
  if (!f.scenario_file.empty()) s = cli::LoadScenario(f.scenario_file);
  if (!f.engine.empty()) {
    const auto engine = cli::ParseEngine(f.engine);
    if (!engine) {
      throw Error(ErrorKind::kValidationError,
                  "--engine must be dense, pauli, trajectories or twomode");
    }
    if (*engine != s.engine) s.SetEngine(*engine);
  }
  if (!f.rates.empty()) cli::ApplyRateOverrides(f.rates, s.rates);
  if (f.alpha) s.alpha = *f.alpha;
  if (f.t_max) s.t_max = *f.t_max;
  if (f.nmax) s.nmax = *f.nmax;
  if (f.samples) s.samples = *f.samples;
  if (f.u1) s.u1 = *f.u1;
  if (f.name) s.name = *f.name;
  if (f.fixed_step) s.integrator.fixed_step = *f.fixed_step;
  if (f.seed) {
    if (!s.trajectory) {
      throw Error(ErrorKind::kValidationError, "--seed applies only to the trajectories engine");
    }
    s.trajectory->seed = *f.seed;
  }
  cli::Validate(s);
  return s;
}

void AddScenarioFlags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--engine", f.engine, "dense | pauli | trajectories | twomode");
  cmd->add_option("--seed", f.seed, "Master seed for the trajectories engine");
  cmd->add_option("--fixed-step", f.fixed_step, "Fixed integrator step (bit-reproducible)");
  cmd->add_option("--rates", f.rates, "Rate overrides, e.g. e=1,q=0.05,s=0,t=0");
  cmd->add_option("--alpha", f.alpha, "Real coherent amplitude");
  cmd->add_option("--tmax", f.t_max, "Final time");
  cmd->add_option("--nmax", f.nmax, "Fock cutoff (mode A for twomode)");
  cmd->add_option("--samples", f.samples, "Number of output samples");
  cmd->add_option("--u1", f.u1, "Kerr coefficient");
  cmd->add_option("--name", f.name, "Scenario name");
}

int Run(const RunFlags& f) {
  const cli::Scenario s = ResolveScenario(f);
  const cli::Format format = ParseFormat(f.format);
  const cli::RunOutput out = cli::RunScenario(s);
  for (const std::string& w : out.warnings) std::cerr << "warning: " << w << "\n";
  if (f.out.empty()) {
    std::cout << (format == cli::Format::kCsv ? cli::SeriesCsv(out.series)
                                              : cli::SeriesJson(out.series).dump(1) + "\n");
    return kExitOk;
  }
  cli::WriteRun(out, f.out, format, f.svg);
  std::cerr << "wrote " << f.out << "\n";
  return kExitOk;
}

int Sweep(const std::string& file, const std::string& out, unsigned jobs) {
  const cli::SweepSpec spec = cli::LoadSweep(file);
  const std::vector<cli::SweepRow> rows = cli::RunSweep(spec, jobs);
  const std::string csv = cli::SweepCsv(spec, rows);
  if (const auto note = cli::SweepMonotonicityNote(spec, rows)) std::cerr << *note << "\n";
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::kIoError, "cannot create " + out + ": " + ec.message());
    cli::WriteText(std::filesystem::path(out) / "sweep.csv", csv);
    std::cerr << "wrote " << out << "/sweep.csv\n";
  }
  return kExitOk;
}

int Preset(const std::string& name, const std::string& out, const std::string& format,
           bool svg, const std::string& engine) {
  std::optional<cli::Engine> override_engine;
  if (!engine.empty()) {
    override_engine = cli::ParseEngine(engine);
    if (!override_engine) {
      throw Error(ErrorKind::kValidationError,
                  "--engine must be dense, pauli, trajectories or twomode");
    }
  }
  const auto report = cli::RunPreset(name, out, ParseFormat(format), svg, override_engine);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

int ValidateFiles(const std::vector<std::string>& files) {
  int code = kExitOk;
  for (const std::string& file : files) {
    try {
      const cli::Scenario s = cli::LoadScenario(file);
      std::cout << file << ": ok (" << s.name << ", engine " << cli::EngineName(s.engine)
                << ")\n";
    } catch (const Error& e) {
      std::cerr << file << ": " << e.what() << "\n";
      code = std::max(code, ExitCodeFor(e));
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated-Fock-space simulator of nonlinear photon absorption"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("nlatten ") + NLATTEN_VERSION);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario (file, manifest or flags)");
  run_cmd->add_option("scenario", run.scenario_file, "Scenario JSON or run manifest");
  run_cmd->add_option("--out", run.out, "Output directory (stdout series when omitted)");
  run_cmd->add_option("--format", run.format, "csv | json");
  run_cmd->add_flag("--svg", run.svg, "Also write plot.svg");
  AddScenarioFlags(run_cmd, run);

  std::string sweep_file, sweep_out;
  unsigned jobs = 0;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sigma-minimum table over a parameter grid");
  sweep_cmd->add_option("file", sweep_file, "Sweep JSON")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output directory (stdout CSV when omitted)");
  sweep_cmd->add_option("--jobs", jobs, "Concurrent grid points (0 = hardware threads)");

  std::string preset_name, preset_out = ".", preset_format = "csv", preset_engine;
  bool preset_svg = false;
  CLI::App* preset_cmd = app.add_subcommand("preset", "Run a preset group: fig1 or fig2");
  preset_cmd->add_option("name", preset_name, "fig1 | fig2")->required();
  preset_cmd->add_option("--out", preset_out, "Output directory");
  preset_cmd->add_option("--format", preset_format, "csv | json");
  preset_cmd->add_flag("--svg", preset_svg, "Also write plot.svg per run");
  preset_cmd->add_option("--engine", preset_engine, "Engine override");

  std::vector<std::string> validate_files;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Parse and validate scenario files");
  validate_cmd->add_option("files", validate_files, "Scenario JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run_cmd) return Run(run);
    if (*sweep_cmd) return Sweep(sweep_file, sweep_out, jobs);
    if (*preset_cmd) return Preset(preset_name, preset_out, preset_format, preset_svg, preset_engine);
    if (*validate_cmd) return ValidateFiles(validate_files);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
