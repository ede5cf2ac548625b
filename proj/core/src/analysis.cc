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

#include "nlatten/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nlatten/error.h"

namespace nlatten {
namespace {

enum class ChannelKind { kEffective, kLinear, kTwoPhoton, kThreePhoton };

ChannelKind Classify(const JumpChannel& c) {
  if (c.j == 1 && c.k == 2) return ChannelKind::kEffective;
  if (c.j == 0 && c.k == 1) return ChannelKind::kLinear;
  if (c.j == 0 && c.k == 2) return ChannelKind::kTwoPhoton;
  if (c.j == 0 && c.k == 3) return ChannelKind::kThreePhoton;
  throw Error(ErrorKind::kUnsupportedChannels,
              "steady-state analysis covers only a, a^2, a^3 and a^dagger a a");
}

// Sums p_n over n = r (mod m) onto level r.
Eigen::VectorXd FoldByResidue(const Eigen::VectorXd& p, int m) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size());
  std::vector<double> acc(m, 0.0);
  for (Eigen::Index n = 0; n < p.size(); ++n) acc[n % m] += p(n);
  for (int r = 0; r < m && r < p.size(); ++r) out(r) = acc[r];
  return out;
}

}  // namespace

std::string_view PredictionBasisName(PredictionBasis basis) {
  switch (basis) {
    case PredictionBasis::kSinglePhotonDecoupling: return "single_photon_decoupling";
    case PredictionBasis::kParity: return "parity";
    case PredictionBasis::kResidueMod3: return "residue_mod_3";
    case PredictionBasis::kVacuum: return "vacuum";
    case PredictionBasis::kNumeric: return "numeric";
  }
  return "unknown";
}

SteadyPrediction SteadyStatePrediction(const PopulationVector& p0,
                                       std::span<const JumpChannel> channels) {
  bool has[4] = {false, false, false, false};
  int active = 0;
  for (const JumpChannel& c : channels) {
    c.Validate();
    const ChannelKind kind = Classify(c);
    if (c.rate > 0.0) {
      if (!has[static_cast<int>(kind)]) ++active;
      has[static_cast<int>(kind)] = true;
    }
  }
  if (active == 0) {
    throw Error(ErrorKind::kInvalidArgument, "no channel has a positive rate");
  }
  const Eigen::VectorXd& p = p0.values();
  SteadyPrediction out;
  if (has[static_cast<int>(ChannelKind::kLinear)]) {
    out.p_inf = Eigen::VectorXd::Zero(p.size());
    out.p_inf(0) = p.sum();
    out.basis = PredictionBasis::kVacuum;
    return out;
  }
  if (active == 1 && has[static_cast<int>(ChannelKind::kEffective)]) {
    out.p_inf = Eigen::VectorXd::Zero(p.size());
    out.p_inf(0) = p(0);
    if (p.size() > 1) out.p_inf(1) = p.tail(p.size() - 1).sum();
    out.basis = PredictionBasis::kSinglePhotonDecoupling;
    return out;
  }
  if (active == 1 && has[static_cast<int>(ChannelKind::kTwoPhoton)]) {
    out.p_inf = FoldByResidue(p, 2);
    out.basis = PredictionBasis::kParity;
    return out;
  }
  if (active == 1 && has[static_cast<int>(ChannelKind::kThreePhoton)]) {
    out.p_inf = FoldByResidue(p, 3);
    out.basis = PredictionBasis::kResidueMod3;
    return out;
  }
  throw Error(ErrorKind::kNoClosedForm,
              "no conservation law fixes the long-time state of this channel set");
}

SteadyPrediction LongTimeLimit(const PopulationVector& p0,
                               std::span<const JumpChannel> channels,
                               const IntegratorConfig& cfg) {
  try {
    return SteadyStatePrediction(p0, channels);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNoClosedForm) throw;
  }
  double slowest = std::numeric_limits<double>::infinity();
  for (const JumpChannel& c : channels) {
    if (c.rate > 0.0) slowest = std::min(slowest, c.rate);
  }
  const double grid[] = {0.0, 20.0 / slowest};
  const PauliResult run = EvolvePopulations(p0, channels, grid, cfg);
  return SteadyPrediction{run.final_populations, PredictionBasis::kNumeric};
}

double EffectiveRate(std::complex<double> u4, double gamma_b, double gamma_a) {
  if (!(gamma_b > 0.0)) {
    throw Error(ErrorKind::kNonpositiveGammaB, "gamma_b must be > 0");
  }
  return gamma_a * std::norm(2.0 * u4 / gamma_b);
}

SigmaMinimum FindSigmaMin(const TimeSeries& series, double t_lo, double t_hi) {
  const std::vector<double>& t = series.t;
  const std::vector<double>& s = series.std_n;
  std::size_t lo = 0;
  while (lo < t.size() && t[lo] < t_lo) ++lo;
  std::size_t hi = lo;
  while (hi < t.size() && t[hi] <= t_hi) ++hi;
  // Window is [lo, hi).
  if (hi - lo < 3) {
    throw Error(ErrorKind::kNoInteriorMinimum,
                "fewer than three samples inside the search window");
  }

  // Running maxima from each end let each candidate check for a genuine rise.
  std::vector<double> max_left(hi - lo), max_right(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    max_left[i - lo] = i == lo ? s[i] : std::max(max_left[i - lo - 1], s[i]);
  }
  for (std::size_t i = hi; i-- > lo;) {
    max_right[i - lo] = i + 1 == hi ? s[i] : std::max(max_right[i - lo + 1], s[i]);
  }

  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = lo + 1; i + 1 < hi; ++i) {
    if (!(s[i] <= s[i - 1] && s[i] <= s[i + 1])) continue;
    const double rise = 1e-8 * std::max(1.0, s[i]);
    if (!(max_left[i - 1 - lo] > s[i] + rise && max_right[i + 1 - lo] > s[i] + rise)) {
      continue;
    }
    if (!found || s[i] < s[best]) {
      best = i;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorKind::kNoInteriorMinimum,
                "std_n has no interior minimum in the search window");
  }

  const double t0 = t[best - 1], t1 = t[best], t2 = t[best + 1];
  const double s0 = s[best - 1], s1 = s[best], s2 = s[best + 1];
  // Vertex of the parabola through the three samples (divided differences).
  const double d01 = (s1 - s0) / (t1 - t0);
  const double d12 = (s2 - s1) / (t2 - t1);
  const double curv = (d12 - d01) / (t2 - t0);
  double t_star = t1;
  if (curv > 0.0) {
    t_star = 0.5 * (t0 + t1) - d01 / (2.0 * curv);
    t_star = std::clamp(t_star, t0, t2);
  }

  const double w0 = (t_star - t1) * (t_star - t2) / ((t0 - t1) * (t0 - t2));
  const double w1 = (t_star - t0) * (t_star - t2) / ((t1 - t0) * (t1 - t2));
  const double w2 = (t_star - t0) * (t_star - t1) / ((t2 - t0) * (t2 - t1));

  SigmaMinimum out;
  out.t_star = t_star;
  out.sigma_star = std::min(s1, w0 * s0 + w1 * s1 + w2 * s2);
  out.populations = w0 * series.PopulationsAt(best - 1) +
                    w1 * series.PopulationsAt(best) +
                    w2 * series.PopulationsAt(best + 1);
  out.grid_index = best;
  return out;
}

}  // namespace nlatten
