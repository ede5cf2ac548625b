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

#include "scenario.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nlatten/error.h"

namespace nlatten::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void FieldError(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kParseError, "field '" + path + "': " + what);
}

double Number(const json& v, const std::string& path) {
  if (!v.is_number()) FieldError(path, "expected a number");
  return v.get<double>();
}

std::int64_t Integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) FieldError(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t Unsigned(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  FieldError(path, "expected a nonnegative integer");
}

bool Boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) FieldError(path, "expected true or false");
  return v.get<bool>();
}

std::string String(const json& v, const std::string& path) {
  if (!v.is_string()) FieldError(path, "expected a string");
  return v.get<std::string>();
}

// A real number or a [re, im] pair.
std::complex<double> ComplexValue(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  FieldError(path, "expected a number or a [re, im] pair");
}

const json& Object(const json& v, const std::string& path) {
  if (!v.is_object()) FieldError(path, "expected an object");
  return v;
}

ordered_json ComplexJson(std::complex<double> z) {
  if (z.imag() == 0.0) return z.real();
  return ordered_json::array({z.real(), z.imag()});
}

std::string_view SchemeName(Scheme s) {
  switch (s) {
    case Scheme::kAutomatic: return "auto";
    case Scheme::kExplicitRk45: return "rk45";
    case Scheme::kImplicitSdirk4: return "sdirk4";
  }
  return "auto";
}

Scheme ParseScheme(const json& v, const std::string& path) {
  const std::string name = String(v, path);
  if (name == "auto") return Scheme::kAutomatic;
  if (name == "rk45") return Scheme::kExplicitRk45;
  if (name == "sdirk4") return Scheme::kImplicitSdirk4;
  FieldError(path, "expected one of auto, rk45, sdirk4");
}

void ReadRates(const json& obj, Rates& r, std::vector<std::string>& unknown) {
  for (const auto& [key, v] : Object(obj, "rates").items()) {
    const std::string path = "rates." + key;
    if (key == "gamma_e") r.gamma_e = Number(v, path);
    else if (key == "gamma_q") r.gamma_q = Number(v, path);
    else if (key == "gamma_s") r.gamma_s = Number(v, path);
    else if (key == "gamma_t") r.gamma_t = Number(v, path);
    else unknown.push_back("unknown field '" + path + "'");
  }
}

void ReadIntegrator(const json& obj, IntegratorConfig& c, std::vector<std::string>& unknown) {
  for (const auto& [key, v] : Object(obj, "integrator").items()) {
    const std::string path = "integrator." + key;
    if (key == "abs_tol") c.abs_tol = Number(v, path);
    else if (key == "rel_tol") c.rel_tol = Number(v, path);
    else if (key == "max_step") c.max_step = Number(v, path);
    else if (key == "fixed_step") {
      c.fixed_step = v.is_null() ? std::nullopt : std::optional<double>(Number(v, path));
    } else if (key == "scheme") c.scheme = ParseScheme(v, path);
    else if (key == "trace_tol") c.trace_tol = Number(v, path);
    else if (key == "check_positivity") c.check_positivity = Boolean(v, path);
    else if (key == "max_steps") c.max_steps = Integer(v, path);
    else unknown.push_back("unknown field '" + path + "'");
  }
}

void ReadTrajectory(const json& obj, TrajectorySettings& t, std::vector<std::string>& unknown) {
  for (const auto& [key, v] : Object(obj, "trajectory").items()) {
    const std::string path = "trajectory." + key;
    if (key == "n_traj") t.n_traj = Unsigned(v, path);
    else if (key == "seed") t.seed = Unsigned(v, path);
    else if (key == "dt_max") t.dt_max = Number(v, path);
    else if (key == "workers") t.workers = static_cast<unsigned>(Unsigned(v, path));
    else unknown.push_back("unknown field '" + path + "'");
  }
}

void ReadTwoMode(const json& obj, TwoModeSettings& t, std::vector<std::string>& unknown) {
  for (const auto& [key, v] : Object(obj, "twomode").items()) {
    const std::string path = "twomode." + key;
    if (key == "u4") t.u4 = ComplexValue(v, path);
    else if (key == "gamma_b") t.gamma_b = Number(v, path);
    else if (key == "gamma_a") t.gamma_a = Number(v, path);
    else if (key == "nmax_b") t.nmax_b = static_cast<int>(Integer(v, path));
    else unknown.push_back("unknown field '" + path + "'");
  }
}

bool ValidName(const std::string& name) {
  if (name.empty() || name.front() == '.') return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

bool Finite(std::complex<double> z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

Scenario Base(std::string name, Rates rates) {
  Scenario s;
  s.name = std::move(name);
  s.alpha = 3.0;
  s.nmax = 40;
  s.rates = rates;
  s.t_max = 100.0;
  s.samples = 10001;
  s.engine = Engine::kDense;
  return s;
}

}  // namespace

std::string_view EngineName(Engine engine) {
  switch (engine) {
    case Engine::kDense: return "dense";
    case Engine::kPauli: return "pauli";
    case Engine::kTrajectories: return "trajectories";
    case Engine::kTwoMode: return "twomode";
  }
  return "dense";
}

std::optional<Engine> ParseEngine(std::string_view name) {
  if (name == "dense") return Engine::kDense;
  if (name == "pauli") return Engine::kPauli;
  if (name == "trajectories") return Engine::kTrajectories;
  if (name == "twomode") return Engine::kTwoMode;
  return std::nullopt;
}

std::vector<JumpChannel> Rates::Channels() const {
  std::vector<JumpChannel> out;
  if (gamma_e > 0.0) out.push_back(channels::Effective(gamma_e));
  if (gamma_q > 0.0) out.push_back(channels::Linear(gamma_q));
  if (gamma_s > 0.0) out.push_back(channels::TwoPhoton(gamma_s));
  if (gamma_t > 0.0) out.push_back(channels::ThreePhoton(gamma_t));
  return out;
}

bool Rates::AnyPositive() const {
  return gamma_e > 0.0 || gamma_q > 0.0 || gamma_s > 0.0 || gamma_t > 0.0;
}

void Scenario::SetEngine(Engine e) {
  engine = e;
  if (e == Engine::kTrajectories) {
    if (!trajectory) trajectory.emplace();
  } else {
    trajectory.reset();
  }
  if (e == Engine::kTwoMode) {
    if (!twomode) twomode.emplace();
  } else {
    twomode.reset();
  }
}

std::vector<double> Scenario::Grid() const { return UniformGrid(t_max, samples); }

TwoModeParams Scenario::TwoMode() const {
  const TwoModeSettings t = twomode.value_or(TwoModeSettings{});
  TwoModeParams p;
  p.u4 = t.u4;
  p.gamma_b = t.gamma_b;
  p.gamma_a_formula = t.gamma_a.value_or(t.gamma_b);
  p.nmax_a = nmax;
  p.nmax_b = t.nmax_b;
  return p;
}

std::vector<std::string> Violations(const Scenario& s) {
  std::vector<std::string> v;
  if (!ValidName(s.name)) {
    v.push_back("name must be nonempty and use only letters, digits, '_', '-', '.'");
  }
  if (!Finite(s.alpha)) v.push_back("alpha must be finite");
  if (s.nmax < 1) {
    v.push_back("nmax must be >= 1");
  } else if (Finite(s.alpha)) {
    const double tail = CoherentTailMass(s.alpha, FockCutoff(s.nmax));
    if (!(tail < kCoherentTailTolerance)) {
      std::ostringstream os;
      os << "nmax=" << s.nmax << " drops coherent tail mass " << tail
         << " >= " << kCoherentTailTolerance << " (smallest admissible nmax is "
         << MinimalCoherentCutoff(s.alpha).nmax() << ")";
      v.push_back(os.str());
    }
  }
  const std::pair<const char*, double> rates[] = {{"gamma_e", s.rates.gamma_e},
                                                  {"gamma_q", s.rates.gamma_q},
                                                  {"gamma_s", s.rates.gamma_s},
                                                  {"gamma_t", s.rates.gamma_t}};
  for (const auto& [name, rate] : rates) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
      v.push_back(std::string("rates.") + name + " must be finite and >= 0");
    }
  }
  if (s.engine == Engine::kTwoMode) {
    if (s.rates.AnyPositive()) {
      v.push_back("twomode engine derives its loss from gamma_b; rates must be zero");
    }
    if (s.u1 != 0.0) v.push_back("twomode engine has no Kerr term; u1 must be 0");
  } else if (!s.rates.AnyPositive()) {
    v.push_back("at least one rate must be > 0");
  }
  if (!std::isfinite(s.u1)) v.push_back("u1 must be finite");
  if (!(s.t_max > 0.0) || !std::isfinite(s.t_max)) v.push_back("t_max must be finite and > 0");
  if (s.samples < 2) v.push_back("samples must be >= 2");

  const IntegratorConfig& c = s.integrator;
  if (!(c.abs_tol > 0.0)) v.push_back("integrator.abs_tol must be > 0");
  if (!(c.rel_tol > 0.0)) v.push_back("integrator.rel_tol must be > 0");
  if (!(c.max_step > 0.0)) v.push_back("integrator.max_step must be > 0");
  if (c.fixed_step && !(*c.fixed_step > 0.0 && std::isfinite(*c.fixed_step))) {
    v.push_back("integrator.fixed_step must be finite and > 0");
  }
  if (!(c.trace_tol > 0.0)) v.push_back("integrator.trace_tol must be > 0");
  if (c.max_steps < 1) v.push_back("integrator.max_steps must be >= 1");

  const bool traj = s.engine == Engine::kTrajectories;
  if (traj != s.trajectory.has_value()) {
    v.push_back(traj ? "engine trajectories requires a trajectory block"
                     : "trajectory block is only allowed with engine trajectories");
  }
  if (s.trajectory) {
    if (s.trajectory->n_traj < 1) v.push_back("trajectory.n_traj must be >= 1");
    if (!(s.trajectory->dt_max > 0.0) || !std::isfinite(s.trajectory->dt_max)) {
      v.push_back("trajectory.dt_max must be finite and > 0");
    }
  }
  const bool two = s.engine == Engine::kTwoMode;
  if (two != s.twomode.has_value()) {
    v.push_back(two ? "engine twomode requires a twomode block"
                    : "twomode block is only allowed with engine twomode");
  }
  if (s.twomode) {
    if (!(s.twomode->gamma_b > 0.0) || !std::isfinite(s.twomode->gamma_b)) {
      v.push_back("twomode.gamma_b must be finite and > 0");
    }
    if (s.twomode->gamma_a && (!(*s.twomode->gamma_a >= 0.0) || !std::isfinite(*s.twomode->gamma_a))) {
      v.push_back("twomode.gamma_a must be finite and >= 0");
    }
    if (!Finite(s.twomode->u4)) v.push_back("twomode.u4 must be finite");
    if (s.twomode->nmax_b < 1) v.push_back("twomode.nmax_b must be >= 1");
  }
  return v;
}

void Validate(const Scenario& s) {
  const std::vector<std::string> v = Violations(s);
  if (v.empty()) return;
  std::string msg = "scenario '" + s.name + "' has " + std::to_string(v.size()) + " violation(s):";
  for (const std::string& line : v) msg += "\n  - " + line;
  throw Error(ErrorKind::kValidationError, msg);
}

nlohmann::json ParseJson(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::kParseError, std::string(source) + ":" + std::to_string(line) +
                                            ":" + std::to_string(col) + ": " + e.what());
  }
}

Scenario ParseScenario(std::string_view text, std::string_view source) {
  json doc = ParseJson(text, source);
  if (!doc.is_object()) {
    throw Error(ErrorKind::kParseError, std::string(source) + ": top level must be an object");
  }
  if (doc.contains("scenario") && doc["scenario"].is_object()) doc = doc["scenario"];

  Scenario s;
  s.integrator = IntegratorConfig{};
  std::vector<std::string> unknown;
  std::optional<Engine> engine;
  for (const auto& [key, v] : doc.items()) {
    if (key == "name") s.name = String(v, key);
    else if (key == "alpha") s.alpha = ComplexValue(v, key);
    else if (key == "nmax") s.nmax = static_cast<int>(Integer(v, key));
    else if (key == "rates") ReadRates(v, s.rates, unknown);
    else if (key == "u1") s.u1 = Number(v, key);
    else if (key == "t_max") s.t_max = Number(v, key);
    else if (key == "samples") {
      const std::int64_t n = Integer(v, key);
      s.samples = n < 0 ? 0 : static_cast<std::size_t>(n);
    } else if (key == "engine") {
      engine = ParseEngine(String(v, key));
      if (!engine) FieldError(key, "expected one of dense, pauli, trajectories, twomode");
    } else if (key == "integrator") ReadIntegrator(v, s.integrator, unknown);
    else if (key == "trajectory") ReadTrajectory(v, s.trajectory.emplace(), unknown);
    else if (key == "twomode") ReadTwoMode(v, s.twomode.emplace(), unknown);
    else unknown.push_back("unknown field '" + key + "'");
  }
  if (engine) s.engine = *engine;

  std::vector<std::string> all = std::move(unknown);
  for (std::string& line : Violations(s)) all.push_back(std::move(line));
  if (!all.empty()) {
    std::string msg = std::string(source) + ": " + std::to_string(all.size()) + " violation(s):";
    for (const std::string& line : all) msg += "\n  - " + line;
    throw Error(ErrorKind::kValidationError, msg);
  }
  return s;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Scenario LoadScenario(const std::string& path) { return ParseScenario(ReadFile(path), path); }

ordered_json ToJson(const Scenario& s) {
  ordered_json j;
  j["name"] = s.name;
  j["alpha"] = ComplexJson(s.alpha);
  j["nmax"] = s.nmax;
  j["rates"] = {{"gamma_e", s.rates.gamma_e},
                {"gamma_q", s.rates.gamma_q},
                {"gamma_s", s.rates.gamma_s},
                {"gamma_t", s.rates.gamma_t}};
  j["u1"] = s.u1;
  j["t_max"] = s.t_max;
  j["samples"] = s.samples;
  j["engine"] = EngineName(s.engine);
  ordered_json integ;
  integ["abs_tol"] = s.integrator.abs_tol;
  integ["rel_tol"] = s.integrator.rel_tol;
  if (std::isfinite(s.integrator.max_step)) integ["max_step"] = s.integrator.max_step;
  integ["fixed_step"] = s.integrator.fixed_step ? ordered_json(*s.integrator.fixed_step)
                                                : ordered_json(nullptr);
  integ["scheme"] = SchemeName(s.integrator.scheme);
  integ["trace_tol"] = s.integrator.trace_tol;
  integ["check_positivity"] = s.integrator.check_positivity;
  integ["max_steps"] = s.integrator.max_steps;
  j["integrator"] = integ;
  if (s.trajectory) {
    j["trajectory"] = {{"n_traj", s.trajectory->n_traj},
                       {"seed", s.trajectory->seed},
                       {"dt_max", s.trajectory->dt_max},
                       {"workers", s.trajectory->workers}};
  }
  if (s.twomode) {
    ordered_json t;
    t["u4"] = ComplexJson(s.twomode->u4);
    t["gamma_b"] = s.twomode->gamma_b;
    t["gamma_a"] = s.twomode->gamma_a.value_or(s.twomode->gamma_b);
    t["nmax_b"] = s.twomode->nmax_b;
    j["twomode"] = t;
  }
  return j;
}

void ApplyRateOverrides(std::string_view spec, Rates& rates) {
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    const std::string_view item = spec.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kParseError, "rate override '" + std::string(item) + "' lacks '='");
    }
    const std::string key(item.substr(0, eq));
    const std::string value(item.substr(eq + 1));
    double x = 0.0;
    try {
      std::size_t used = 0;
      x = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParseError, "rate override '" + key + "' has non-numeric value '" +
                                              value + "'");
    }
    if (key == "e") rates.gamma_e = x;
    else if (key == "q") rates.gamma_q = x;
    else if (key == "s") rates.gamma_s = x;
    else if (key == "t") rates.gamma_t = x;
    else {
      throw Error(ErrorKind::kParseError,
                  "unknown rate key '" + key + "' (expected e, q, s or t)");
    }
  }
}

std::vector<Scenario> Preset(std::string_view name) {
  if (name == "fig1") {
    return {Base("fig1_effective", {1.0, 0.0, 0.0, 0.0}),
            Base("fig1_two_photon", {0.0, 0.0, 1.0, 0.0}),
            Base("fig1_three_photon", {0.0, 0.0, 0.0, 1.0})};
  }
  if (name == "fig2") {
    return {Base("fig2_linear", {1.0, 0.05, 0.0, 0.0}),
            Base("fig2_two_photon", {1.0, 0.0, 0.05, 0.0}),
            Base("fig2_mixed", {1.0, 0.025, 0.025, 0.0})};
  }
  throw Error(ErrorKind::kValidationError,
              "unknown preset '" + std::string(name) + "' (expected fig1 or fig2)");
}

std::vector<std::string> PresetNames() { return {"fig1", "fig2"}; }

}  // namespace nlatten::cli
