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

#ifndef NLATTEN_ANALYSIS_H_
#define NLATTEN_ANALYSIS_H_

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "nlatten/fock.h"
#include "nlatten/integrator.h"
#include "nlatten/pauli.h"
#include "nlatten/timeseries.h"

namespace nlatten {

// Which conservation law (or numeric run) fixes the long-time populations.
enum class PredictionBasis {
  kSinglePhotonDecoupling,  // pure a^dagger a a: vacuum weight frozen, rest ends on |1>
  kParity,                  // pure a^2
  kResidueMod3,             // pure a^3
  kVacuum,                  // any set containing linear loss
  kNumeric,                 // long-time integration, no closed form
};

std::string_view PredictionBasisName(PredictionBasis basis);

struct SteadyPrediction {
  Eigen::VectorXd p_inf;
  PredictionBasis basis = PredictionBasis::kNumeric;
};

// Closed-form long-time populations for channel sets with a conservation law.
// Channels with zero rate are ignored. Throws kUnsupportedChannels for
// channels outside a, a^2, a^3, a^dagger a a, kInvalidArgument when no rate is
// positive, and kNoClosedForm otherwise (for example {a^dagger a a, a^2}).
SteadyPrediction SteadyStatePrediction(const PopulationVector& p0,
                                       std::span<const JumpChannel> channels);

// Closed form when available; otherwise integrates the population cascade to
// t = 20 / (smallest positive rate) and tags the result kNumeric.
SteadyPrediction LongTimeLimit(const PopulationVector& p0,
                               std::span<const JumpChannel> channels,
                               const IntegratorConfig& cfg = {});

// gamma_a * |2 u4 / gamma_b|^2. Throws kNonpositiveGammaB unless gamma_b > 0.
double EffectiveRate(std::complex<double> u4, double gamma_b, double gamma_a);

struct SigmaMinimum {
  double t_star = 0.0;
  double sigma_star = 0.0;
  // Populations at t_star by quadratic interpolation through the bracketing
  // samples.
  Eigen::VectorXd populations;
  std::size_t grid_index = 0;
};

// Interior local minimum of std_n over samples with t in [t_lo, t_hi]. A grid
// point qualifies when it is no larger than both neighbours and std_n rises by
// more than 1e-8 * max(1, sigma) somewhere on each side inside the window.
// The smallest qualifying sigma wins (ties toward smaller t), then a parabola
// through the three bracketing samples refines t_star. Throws
// kNoInteriorMinimum when nothing qualifies.
SigmaMinimum FindSigmaMin(const TimeSeries& series, double t_lo, double t_hi);

}  // namespace nlatten

#endif  // NLATTEN_ANALYSIS_H_
