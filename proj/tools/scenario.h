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

#ifndef NLATTEN_TOOLS_SCENARIO_H_
#define NLATTEN_TOOLS_SCENARIO_H_

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nlatten/fock.h"
#include "nlatten/integrator.h"
#include "nlatten/trajectories.h"
#include "nlatten/twomode.h"

namespace nlatten::cli {

enum class Engine { kDense, kPauli, kTrajectories, kTwoMode };

std::string_view EngineName(Engine engine);
std::optional<Engine> ParseEngine(std::string_view name);

// Rates in units of the reference rate.
struct Rates {
  double gamma_e = 0.0;
  double gamma_q = 0.0;
  double gamma_s = 0.0;
  double gamma_t = 0.0;

  std::vector<JumpChannel> Channels() const;
  bool AnyPositive() const;
};

struct TrajectorySettings {
  std::size_t n_traj = 10000;
  std::uint64_t seed = 0;
  double dt_max = 1.0;
  unsigned workers = 0;
};

struct TwoModeSettings {
  std::complex<double> u4{1.0, 0.0};
  double gamma_b = 50.0;
  // Defaults to gamma_b when absent.
  std::optional<double> gamma_a;
  int nmax_b = 4;
};

struct Scenario {
  std::string name = "scenario";
  std::complex<double> alpha{3.0, 0.0};
  int nmax = 40;
  Rates rates;
  double u1 = 0.0;
  double t_max = 100.0;
  std::size_t samples = 1001;
  Engine engine = Engine::kDense;
  IntegratorConfig integrator;
  std::optional<TrajectorySettings> trajectory;
  std::optional<TwoModeSettings> twomode;

  // Switches engine and adds or drops the engine-specific block to match.
  void SetEngine(Engine e);
  std::vector<double> Grid() const;
  TwoModeParams TwoMode() const;
};

// Every rule violated by `s`, one human-readable line each. Empty when valid.
std::vector<std::string> Violations(const Scenario& s);

// Throws kValidationError listing every violation.
void Validate(const Scenario& s);

// Parses JSON text; syntax errors throw kParseError with source:line:column.
nlohmann::json ParseJson(std::string_view text, std::string_view source);

// Whole file contents; throws kIoError when unreadable.
std::string ReadFile(const std::string& path);

// Parses scenario JSON text. Syntax errors throw kParseError with line and
// column; wrong-typed fields throw kParseError naming the field path. Unknown
// fields are collected with other violations into kValidationError. A run
// manifest (an object with a "scenario" member) is accepted and its scenario
// extracted. The result is validated.
Scenario ParseScenario(std::string_view text, std::string_view source = "<input>");
Scenario LoadScenario(const std::string& path);

// Structured form of a scenario with every field resolved.
nlohmann::ordered_json ToJson(const Scenario& s);

// Parses "e=1,q=0.05,s=0,t=0" into `rates` (unlisted entries untouched).
void ApplyRateOverrides(std::string_view spec, Rates& rates);

// Named preset run groups.
std::vector<Scenario> Preset(std::string_view name);
std::vector<std::string> PresetNames();

}  // namespace nlatten::cli

#endif  // NLATTEN_TOOLS_SCENARIO_H_
