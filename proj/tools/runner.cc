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

#include "runner.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "nlatten/dynamics.h"
#include "nlatten/error.h"
#include "nlatten/pauli.h"
#include "nlatten/trajectories.h"
#include "nlatten/twomode.h"

#ifndef NLATTEN_VERSION
#define NLATTEN_VERSION "0.0.0"
#endif

namespace nlatten::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view SchemeLabel(Scheme s) {
  switch (s) {
    case Scheme::kAutomatic: return "auto";
    case Scheme::kExplicitRk45: return "rk45";
    case Scheme::kImplicitSdirk4: return "sdirk4";
  }
  return "auto";
}

ordered_json StatsJson(const IntegrationStats& st) {
  ordered_json j;
  j["scheme"] = SchemeLabel(st.scheme_used);
  j["accepted_steps"] = st.accepted;
  j["rejected_steps"] = st.rejected;
  j["rhs_evals"] = st.rhs_evals;
  j["shifted_solves"] = st.shifted_solves;
  j["smallest_step"] = std::isfinite(st.smallest_step) ? ordered_json(st.smallest_step)
                                                       : ordered_json(nullptr);
  j["largest_step"] = st.largest_step;
  return j;
}

ordered_json NumberOrNull(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

RunOutput RunOnGrid(const Scenario& s, const std::vector<double>& grid) {
  RunOutput out;
  out.scenario = s;
  const FockCutoff cutoff(s.nmax);
  const std::vector<JumpChannel> ch = s.rates.Channels();
  const KerrTerm kerr{s.u1};
  switch (s.engine) {
    case Engine::kDense: {
      EvolveResult r = Evolve(CoherentDensity(s.alpha, cutoff), ch, kerr, grid, s.integrator);
      out.series = std::move(r.series);
      out.diagnostics["integrator"] = StatsJson(r.stats);
      out.diagnostics["max_trace_drift"] = r.max_trace_drift;
      out.diagnostics["max_hermiticity_error"] = r.max_hermiticity_error;
      out.diagnostics["min_eigenvalue"] = NumberOrNull(r.min_eigenvalue);
      break;
    }
    case Engine::kPauli: {
      const PopulationVector p0 = PopulationVector::FromDensity(CoherentDensity(s.alpha, cutoff));
      PauliResult r = EvolvePopulations(p0, ch, grid, s.integrator);
      out.series = std::move(r.series);
      out.diagnostics["integrator"] = StatsJson(r.stats);
      out.diagnostics["max_trace_drift"] = r.max_sum_drift;
      break;
    }
    case Engine::kTrajectories: {
      const TrajectorySettings ts = s.trajectory.value_or(TrajectorySettings{});
      TrajectoryConfig cfg;
      cfg.n_traj = ts.n_traj;
      cfg.master_seed = ts.seed;
      cfg.dt_max = ts.dt_max;
      cfg.workers = ts.workers;
      cfg.grid = grid;
      EnsembleResult r = RunEnsemble(CoherentPureState(s.alpha, cutoff), ch, kerr, cfg);
      out.series = r.Series();
      out.standard_error = std::move(r.standard_error);
      out.diagnostics["n_traj"] = r.n_traj;
      out.diagnostics["total_jumps"] = r.total_jumps;
      break;
    }
    case Engine::kTwoMode: {
      const TwoModeParams params = s.TwoMode();
      const TwoModeState rho0 = TwoModeState::Product(
          CoherentDensity(s.alpha, cutoff), DensityMatrix::Fock(0, FockCutoff(params.nmax_b)));
      TwoModeResult r = TwoModeEvolve(rho0, params, grid, s.integrator);
      out.series = std::move(r.mode_a);
      out.b_occupation = std::move(r.b_occupation);
      out.warnings = std::move(r.warnings);
      out.diagnostics["integrator"] = StatsJson(r.stats);
      out.diagnostics["effective_rate"] = params.EffectiveRate();
      out.diagnostics["max_b_occupation"] = r.max_b_occupation;
      out.diagnostics["max_top_b_mass"] = r.max_top_b_mass;
      break;
    }
  }
  return out;
}

void AppendCsvField(std::string& line, double x) {
  line.push_back(',');
  line += FormatDouble(x);
}

// Maps [lo, hi] onto [a, b]; a degenerate range maps to the midpoint.
double Scale(double x, double lo, double hi, double a, double b) {
  if (!(hi > lo)) return 0.5 * (a + b);
  return a + (x - lo) / (hi - lo) * (b - a);
}

std::string Polyline(const std::vector<double>& t, const std::vector<double>& y, double x0,
                     double x1, double y0, double y1, std::string_view colour) {
  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  const double ymin = std::min(0.0, *ymin_it);
  const double ymax = *ymax_it;
  const std::size_t stride = std::max<std::size_t>(1, t.size() / 2000);
  std::ostringstream os;
  os.precision(6);
  os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < t.size(); i += stride) {
    os << Scale(t[i], t.front(), t.back(), x0, x1) << ','
       << Scale(y[i], ymin, ymax, y1, y0) << ' ';
  }
  os << Scale(t.back(), t.front(), t.back(), x0, x1) << ','
     << Scale(y.back(), ymin, ymax, y1, y0) << "\"/>\n";
  os << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 + 4
     << "\" text-anchor=\"end\" font-size=\"10\">" << FormatDouble(ymax) << "</text>\n";
  os << "<text x=\"" << x0 - 4 << "\" y=\"" << y1 + 4
     << "\" text-anchor=\"end\" font-size=\"10\">" << FormatDouble(ymin) << "</text>\n";
  return os.str();
}

std::string Frame(double x0, double x1, double y0, double y1, std::string_view label) {
  std::ostringstream os;
  os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0 << "\" height=\""
     << y1 - y0 << "\" fill=\"none\" stroke=\"#888\"/>\n";
  os << "<text x=\"" << x0 + 6 << "\" y=\"" << y0 + 14 << "\" font-size=\"12\">" << label
     << "</text>\n";
  return os.str();
}

std::string EscapeXml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

RunOutput RunScenario(const Scenario& s) {
  Validate(s);
  try {
    return RunOnGrid(s, s.Grid());
  } catch (const Error& e) {
    throw Error(e.kind(), "scenario '" + s.name + "' (engine " +
                              std::string(EngineName(s.engine)) + "): " + e.what());
  }
}

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string SeriesCsv(const TimeSeries& series) {
  std::string out = "t,mean_n,std_n,g2,trace_err";
  for (int n = 0; n < series.levels(); ++n) out += ",p" + std::to_string(n);
  out.push_back('\n');
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::string line = FormatDouble(series.t[i]);
    AppendCsvField(line, series.mean_n[i]);
    AppendCsvField(line, series.std_n[i]);
    AppendCsvField(line, series.g2[i]);
    AppendCsvField(line, series.trace_err[i]);
    for (int n = 0; n < series.levels(); ++n) AppendCsvField(line, series.Population(i, n));
    out += line;
    out.push_back('\n');
  }
  return out;
}

ordered_json SeriesJson(const TimeSeries& series) {
  ordered_json j;
  j["t"] = series.t;
  j["mean_n"] = series.mean_n;
  j["std_n"] = series.std_n;
  j["g2"] = series.g2;
  j["trace_err"] = series.trace_err;
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Eigen::VectorXd p = series.PopulationsAt(i);
    rows.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  }
  j["populations"] = std::move(rows);
  return j;
}

std::string StandardErrorCsv(const std::vector<double>& t, const Eigen::MatrixXd& se) {
  std::string out = "t";
  for (Eigen::Index n = 0; n < se.cols(); ++n) out += ",se_p" + std::to_string(n);
  out.push_back('\n');
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::string line = FormatDouble(t[i]);
    for (Eigen::Index n = 0; n < se.cols(); ++n) {
      AppendCsvField(line, se(static_cast<Eigen::Index>(i), n));
    }
    out += line;
    out.push_back('\n');
  }
  return out;
}

std::string ModeBCsv(const std::vector<double>& t, const std::vector<double>& occupation) {
  std::string out = "t,b_occupation\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += FormatDouble(t[i]);
    AppendCsvField(out, occupation[i]);
    out.push_back('\n');
  }
  return out;
}

std::string RenderSvg(const TimeSeries& series, std::string_view title) {
  constexpr double kWidth = 760, kHeight = 440;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"20\" y=\"20\" font-size=\"14\">" << EscapeXml(title) << "</text>\n";
  if (series.size() == 0) {
    os << "</svg>\n";
    return os.str();
  }
  os << Frame(70, 490, 40, 220, "mean n");
  os << Polyline(series.t, series.mean_n, 70, 490, 40, 220, "#1f77b4");
  os << Frame(70, 490, 250, 410, "std n");
  os << Polyline(series.t, series.std_n, 70, 490, 250, 410, "#d62728");
  os << "<text x=\"70\" y=\"428\" font-size=\"10\">t = " << FormatDouble(series.t.front())
     << "</text>\n";
  os << "<text x=\"490\" y=\"428\" text-anchor=\"end\" font-size=\"10\">t = "
     << FormatDouble(series.t.back()) << "</text>\n";

  // Final photon-number distribution.
  const double bx0 = 530, bx1 = 740, by0 = 40, by1 = 410;
  os << Frame(bx0, bx1, by0, by1, "final p_n");
  const Eigen::VectorXd p = series.PopulationsAt(series.size() - 1);
  int shown = static_cast<int>(p.size());
  while (shown > 2 && p(shown - 1) < 1e-4) --shown;
  const double width = (bx1 - bx0 - 10) / shown;
  for (int n = 0; n < shown; ++n) {
    const double h = std::clamp(p(n), 0.0, 1.0) * (by1 - by0 - 30);
    os << "<rect x=\"" << bx0 + 5 + n * width << "\" y=\"" << by1 - h << "\" width=\""
       << std::max(1.0, width - 2) << "\" height=\"" << h << "\" fill=\"#2ca02c\"/>\n";
  }
  os << "<text x=\"" << bx0 << "\" y=\"428\" font-size=\"10\">n = 0.." << shown - 1
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

ordered_json Manifest(const RunOutput& out, const std::vector<std::string>& files) {
  ordered_json m;
  m["tool"] = "nlatten";
  m["version"] = NLATTEN_VERSION;
  m["scenario"] = ToJson(out.scenario);
  m["seed"] = out.scenario.trajectory ? ordered_json(out.scenario.trajectory->seed)
                                      : ordered_json(nullptr);
  m["files"] = files;
  m["diagnostics"] = out.diagnostics;
  m["warnings"] = out.warnings;
  return m;
}

void WriteText(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

std::vector<std::string> WriteRun(const RunOutput& out, const std::filesystem::path& dir,
                                  Format format, bool svg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::string> files;
  if (format == Format::kCsv) {
    WriteText(dir / "series.csv", SeriesCsv(out.series));
    files.push_back("series.csv");
  } else {
    WriteText(dir / "series.json", SeriesJson(out.series).dump(1) + "\n");
    files.push_back("series.json");
  }
  if (out.standard_error) {
    WriteText(dir / "stderr.csv", StandardErrorCsv(out.series.t, *out.standard_error));
    files.push_back("stderr.csv");
  }
  if (!out.b_occupation.empty()) {
    WriteText(dir / "mode_b.csv", ModeBCsv(out.series.t, out.b_occupation));
    files.push_back("mode_b.csv");
  }
  if (svg) {
    WriteText(dir / "plot.svg", RenderSvg(out.series, out.scenario.name));
    files.push_back("plot.svg");
  }
  files.push_back("manifest.json");
  WriteText(dir / "manifest.json", Manifest(out, files).dump(2) + "\n");
  return files;
}

SweepSpec ParseSweep(std::string_view text, std::string_view source) {
  const json doc = ParseJson(text, source);
  if (!doc.is_object()) {
    throw Error(ErrorKind::kParseError, std::string(source) + ": top level must be an object");
  }
  std::vector<std::string> violations;
  SweepSpec spec;
  bool have_base = false;
  std::map<std::string, std::vector<double>> ranges;
  for (const auto& [key, v] : doc.items()) {
    if (key == "base") {
      spec.base = ParseScenario(v.dump(), std::string(source) + ":base");
      have_base = true;
    } else if (key == "ranges") {
      if (!v.is_object()) {
        throw Error(ErrorKind::kParseError, "field 'ranges': expected an object");
      }
      for (const auto& [field, values] : v.items()) {
        const bool known = field == "alpha" || field == "gamma_e" || field == "gamma_q" ||
                           field == "gamma_s" || field == "gamma_t";
        if (!known) {
          violations.push_back("ranges." + field +
                               ": only alpha, gamma_e, gamma_q, gamma_s, gamma_t may be swept");
          continue;
        }
        if (!values.is_array()) {
          throw Error(ErrorKind::kParseError,
                      "field 'ranges." + field + "': expected an array of numbers");
        }
        std::vector<double> xs;
        for (const json& x : values) {
          if (!x.is_number()) {
            throw Error(ErrorKind::kParseError,
                        "field 'ranges." + field + "': expected an array of numbers");
          }
          xs.push_back(x.get<double>());
        }
        if (xs.empty()) violations.push_back("ranges." + field + " is empty");
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        ranges[field] = std::move(xs);
      }
    } else if (key == "window") {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw Error(ErrorKind::kParseError, "field 'window': expected [t_lo, t_hi]");
      }
      spec.window = std::make_pair(v[0].get<double>(), v[1].get<double>());
      if (!(spec.window->first < spec.window->second)) {
        violations.push_back("window must satisfy t_lo < t_hi");
      }
    } else {
      violations.push_back("unknown field '" + key + "'");
    }
  }
  if (!have_base) violations.push_back("missing field 'base'");
  if (ranges.empty()) violations.push_back("ranges must name at least one field");
  spec.ranges.assign(ranges.begin(), ranges.end());
  if (violations.empty()) {
    try {
      SweepPoints(spec);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kValidationError) throw;
      violations.push_back(e.what());
    }
  }
  if (!violations.empty()) {
    std::string msg = std::string(source) + ": " + std::to_string(violations.size()) +
                      " violation(s):";
    for (const std::string& line : violations) msg += "\n  - " + line;
    throw Error(ErrorKind::kValidationError, msg);
  }
  return spec;
}

SweepSpec LoadSweep(const std::string& path) { return ParseSweep(ReadFile(path), path); }

std::vector<Scenario> SweepPoints(const SweepSpec& spec) {
  std::size_t total = 1;
  for (const auto& [field, values] : spec.ranges) {
    if (values.empty()) {
      throw Error(ErrorKind::kValidationError, "ranges." + field + " is empty");
    }
    total *= values.size();
  }
  std::vector<Scenario> points;
  std::vector<std::string> violations;
  std::vector<std::size_t> digit(spec.ranges.size(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    Scenario s = spec.base;
    s.name = spec.base.name + "_" + std::to_string(p);
    for (std::size_t f = 0; f < spec.ranges.size(); ++f) {
      const std::string& field = spec.ranges[f].first;
      const double x = spec.ranges[f].second[digit[f]];
      if (field == "alpha") s.alpha = x;
      else if (field == "gamma_e") s.rates.gamma_e = x;
      else if (field == "gamma_q") s.rates.gamma_q = x;
      else if (field == "gamma_s") s.rates.gamma_s = x;
      else if (field == "gamma_t") s.rates.gamma_t = x;
    }
    for (const std::string& v : Violations(s)) violations.push_back(s.name + ": " + v);
    points.push_back(std::move(s));
    // Odometer with the last field varying fastest gives lexicographic order.
    for (std::size_t f = spec.ranges.size(); f-- > 0;) {
      if (++digit[f] < spec.ranges[f].second.size()) break;
      digit[f] = 0;
    }
  }
  if (!violations.empty()) {
    std::string msg = "sweep grid has " + std::to_string(violations.size()) + " violation(s):";
    for (const std::string& line : violations) msg += "\n  - " + line;
    throw Error(ErrorKind::kValidationError, msg);
  }
  return points;
}

SweepRow SummarizeRun(const RunOutput& out, std::vector<double> values,
                      std::optional<std::pair<double, double>> window) {
  SweepRow row;
  row.values = std::move(values);
  const auto [lo, hi] = window.value_or(std::make_pair(out.series.t.front(), out.series.t.back()));
  try {
    row.minimum = FindSigmaMin(out.series, lo, hi);
    row.status = "ok";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNoInteriorMinimum) throw;
    row.status = "no_interior_minimum";
  }
  return row;
}

std::vector<SweepRow> RunSweep(const SweepSpec& spec, unsigned jobs) {
  const std::vector<Scenario> points = SweepPoints(spec);
  std::vector<std::vector<double>> values(points.size());
  {
    std::vector<std::size_t> digit(spec.ranges.size(), 0);
    for (std::size_t p = 0; p < points.size(); ++p) {
      for (std::size_t f = 0; f < spec.ranges.size(); ++f) {
        values[p].push_back(spec.ranges[f].second[digit[f]]);
      }
      for (std::size_t f = spec.ranges.size(); f-- > 0;) {
        if (++digit[f] < spec.ranges[f].second.size()) break;
        digit[f] = 0;
      }
    }
  }
  std::vector<std::optional<SweepRow>> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t p = next++; p < points.size(); p = next++) {
      try {
        rows[p] = SummarizeRun(RunScenario(points[p]), values[p], spec.window);
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, points.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(worker);
    worker();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<SweepRow> out;
  out.reserve(rows.size());
  for (std::optional<SweepRow>& r : rows) out.push_back(std::move(*r));
  return out;
}

std::string SweepCsv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::string out;
  for (const auto& [field, values] : spec.ranges) out += field + ",";
  out += "t_star,sigma_star,p1_star,status\n";
  for (const SweepRow& row : rows) {
    std::string line;
    for (double v : row.values) line += FormatDouble(v) + ",";
    if (row.minimum) {
      const double p1 = row.minimum->populations.size() > 1 ? row.minimum->populations(1) : 0.0;
      line += FormatDouble(row.minimum->t_star) + "," + FormatDouble(row.minimum->sigma_star) +
              "," + FormatDouble(p1) + ",";
    } else {
      line += "nan,nan,nan,";
    }
    line += row.status;
    out += line;
    out.push_back('\n');
  }
  return out;
}

std::optional<std::string> SweepMonotonicityNote(const SweepSpec& spec,
                                                 const std::vector<SweepRow>& rows) {
  if (spec.ranges.size() != 1) return std::nullopt;
  const std::string& field = spec.ranges.front().first;
  if (field != "gamma_q" && field != "gamma_s" && field != "gamma_t") return std::nullopt;
  std::optional<double> prev;
  for (const SweepRow& row : rows) {
    if (!row.minimum || row.minimum->populations.size() < 2) continue;
    const double p1 = row.minimum->populations(1);
    if (prev && p1 > *prev + 1e-12) {
      return "soft check: p1_star increases with " + field + " at " + field + "=" +
             FormatDouble(row.values.front()) + " (report only)";
    }
    prev = p1;
  }
  return "soft check: p1_star nonincreasing in " + field + ": ok";
}

ordered_json RunPreset(std::string_view name, const std::filesystem::path& dir, Format format,
                       bool svg, const std::optional<Engine>& engine_override) {
  std::vector<Scenario> scenarios = Preset(name);
  if (engine_override) {
    for (Scenario& s : scenarios) s.SetEngine(*engine_override);
  }
  ordered_json report;
  report["preset"] = name;
  report["tool"] = "nlatten";
  report["version"] = NLATTEN_VERSION;
  ordered_json runs = ordered_json::array();
  std::vector<RunOutput> outputs;
  for (const Scenario& s : scenarios) {
    RunOutput out = RunScenario(s);
    WriteRun(out, dir / s.name, format, svg);
    const std::size_t last = out.series.size() - 1;
    ordered_json r;
    r["name"] = s.name;
    r["rates"] = ToJson(s)["rates"];
    r["final_mean_n"] = out.series.mean_n[last];
    r["final_std_n"] = out.series.std_n[last];
    const Eigen::VectorXd p = out.series.PopulationsAt(last);
    r["final_populations"] = std::vector<double>(p.data(), p.data() + p.size());
    runs.push_back(std::move(r));
    outputs.push_back(std::move(out));
  }
  report["runs"] = std::move(runs);

  if (name == "fig1") {
    std::string csv = "n";
    for (const Scenario& s : scenarios) csv += "," + s.name;
    csv.push_back('\n');
    const int levels = outputs.front().series.levels();
    for (int n = 0; n < levels; ++n) {
      std::string line = std::to_string(n);
      for (const RunOutput& out : outputs) {
        AppendCsvField(line, out.series.Population(out.series.size() - 1, n));
      }
      csv += line;
      csv.push_back('\n');
    }
    WriteText(dir / "final_distribution.csv", csv);
  } else if (name == "fig2") {
    const RunOutput& mixed = outputs.back();
    const SigmaMinimum m = FindSigmaMin(mixed.series, mixed.series.t.front(), mixed.series.t.back());
    // Exact populations at t* from a dedicated run ending there.
    const RunOutput exact = RunOnGrid(mixed.scenario, {0.0, m.t_star});
    const Eigen::VectorXd p = exact.series.PopulationsAt(1);
    ordered_json sm;
    sm["scenario"] = mixed.scenario.name;
    sm["t_star"] = m.t_star;
    sm["sigma_star"] = m.sigma_star;
    sm["p1_interpolated"] = m.populations(1);
    sm["p1_exact"] = p(1);
    sm["sigma_exact"] = exact.series.std_n[1];
    sm["populations_exact"] = std::vector<double>(p.data(), p.data() + p.size());
    report["sigma_minimum"] = std::move(sm);
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  WriteText(dir / "report.json", report.dump(2) + "\n");
  return report;
}

}  // namespace nlatten::cli
