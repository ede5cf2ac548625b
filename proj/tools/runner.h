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

#ifndef NLATTEN_TOOLS_RUNNER_H_
#define NLATTEN_TOOLS_RUNNER_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "nlatten/analysis.h"
#include "nlatten/integrator.h"
#include "nlatten/timeseries.h"
#include "scenario.h"

namespace nlatten::cli {

enum class Format { kCsv, kJson };

struct RunOutput {
  Scenario scenario;
  TimeSeries series;
  // Trajectory engine: standard error of each population (samples x levels).
  std::optional<Eigen::MatrixXd> standard_error;
  // Two-mode engine: <b^dagger b> at each sample.
  std::vector<double> b_occupation;
  std::vector<std::string> warnings;
  nlohmann::ordered_json diagnostics;
};

// Runs one validated scenario on its engine, starting from the coherent state
// |alpha> (mode B in vacuum for the two-mode engine).
RunOutput RunScenario(const Scenario& s);

// Shortest round-trip text for a double, 17 significant digits at most.
std::string FormatDouble(double x);

// Columns t, mean_n, std_n, g2, trace_err, p0..p{nmax}.
std::string SeriesCsv(const TimeSeries& series);
nlohmann::ordered_json SeriesJson(const TimeSeries& series);
// Columns t, se_p0..se_p{nmax}.
std::string StandardErrorCsv(const std::vector<double>& t, const Eigen::MatrixXd& se);
// Columns t, b_occupation.
std::string ModeBCsv(const std::vector<double>& t, const std::vector<double>& occupation);

// <n>(t) and sigma(n)(t) line plots with a bar inset of the final p_n.
std::string RenderSvg(const TimeSeries& series, std::string_view title);

nlohmann::ordered_json Manifest(const RunOutput& out, const std::vector<std::string>& files);

// Writes the manifest, the series (and engine extras) and optionally the SVG
// into `dir`, creating it. Returns the written file names.
std::vector<std::string> WriteRun(const RunOutput& out, const std::filesystem::path& dir,
                                  Format format, bool svg);

void WriteText(const std::filesystem::path& path, std::string_view text);

struct SweepSpec {
  Scenario base;
  // Swept field name -> values, ordered by field name.
  std::vector<std::pair<std::string, std::vector<double>>> ranges;
  std::optional<std::pair<double, double>> window;
};

struct SweepRow {
  std::vector<double> values;
  std::optional<SigmaMinimum> minimum;
  std::string status;
};

// Sweep file: {"base": scenario, "ranges": {field: [values...]}, "window":
// [t_lo, t_hi]}. Fields are alpha, gamma_e, gamma_q, gamma_s, gamma_t.
SweepSpec ParseSweep(std::string_view text, std::string_view source = "<input>");
SweepSpec LoadSweep(const std::string& path);

// Every grid point as a scenario, in lexicographic order of the swept values.
std::vector<Scenario> SweepPoints(const SweepSpec& spec);

// Sigma-minimum row for one run over `window` (whole run when absent).
SweepRow SummarizeRun(const RunOutput& out, std::vector<double> values,
                      std::optional<std::pair<double, double>> window);

// Runs every point with up to `jobs` concurrent workers. Row order matches
// SweepPoints regardless of completion order.
std::vector<SweepRow> RunSweep(const SweepSpec& spec, unsigned jobs);

// Columns <swept fields...>, t_star, sigma_star, p1_star, status.
std::string SweepCsv(const SweepSpec& spec, const std::vector<SweepRow>& rows);

// Report-only check that p1(t*) does not increase along a single swept loss
// rate. Empty when not applicable.
std::optional<std::string> SweepMonotonicityNote(const SweepSpec& spec,
                                                 const std::vector<SweepRow>& rows);

// Runs a preset group into per-scenario subdirectories of `dir` plus a group
// report; returns the report.
nlohmann::ordered_json RunPreset(std::string_view name, const std::filesystem::path& dir,
                                 Format format, bool svg,
                                 const std::optional<Engine>& engine_override);

}  // namespace nlatten::cli

#endif  // NLATTEN_TOOLS_RUNNER_H_
