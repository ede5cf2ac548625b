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

#ifndef NLATTEN_DYNAMICS_H_
#define NLATTEN_DYNAMICS_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nlatten/fock.h"
#include "nlatten/integrator.h"
#include "nlatten/timeseries.h"

namespace nlatten {

// Strength of the hbar*U1 a^dagger a^dagger a a self-Kerr term, in units of
// the reference rate. The mode frequency itself is removed by working in the
// rotating frame.
struct KerrTerm {
  double u1 = 0.0;
};

// Generator of the single-mode master equation
//
//   d rho/dt = -i [U1 a+a+aa, rho] + sum_c rate_c (L_c rho L_c+ - {L_c+ L_c, rho}/2)
//
// stored element-wise. Every L_c maps |n> to a multiple of |n - shift_c>, so
// element (k, l) only decays and is fed from (k + shift_c, l + shift_c). The
// generator is therefore triangular, which SolveShifted exploits.
class Liouvillian {
 public:
  Liouvillian(std::span<const JumpChannel> channels, KerrTerm kerr,
              FockCutoff cutoff);

  void Apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
  // Solves (I - hg * L) z = b by back substitution from the top level down.
  void SolveShifted(double hg, const Eigen::MatrixXcd& b,
                    Eigen::MatrixXcd& z) const;
  // Re-symmetrizes rho <- (rho + rho^dagger) / 2.
  void PostStep(Eigen::MatrixXcd& rho) const;

  // Self-coupling of element (k, l); these are also the eigenvalues of the
  // generator since it is triangular.
  Complex Diagonal(int k, int l) const { return diag_(k, l); }

  FockCutoff cutoff() const { return cutoff_; }

 private:
  struct Feed {
    int shift;
    double rate;
    // amplitude[n] = <n - shift| L |n>, zero for n < shift.
    std::vector<double> amplitude;
  };
  FockCutoff cutoff_;
  std::vector<Feed> feeds_;
  Eigen::MatrixXcd diag_;
};

// Right-hand side in the literal operator form, built from matrix products.
// Throws kDimensionMismatch if rho is not square.
Eigen::MatrixXcd LindbladRhs(const Eigen::MatrixXcd& rho,
                             std::span<const JumpChannel> channels,
                             KerrTerm kerr);
inline Eigen::MatrixXcd LindbladRhs(const DensityMatrix& rho,
                                    std::span<const JumpChannel> channels,
                                    KerrTerm kerr) {
  return LindbladRhs(rho.matrix(), channels, kerr);
}

struct EvolveResult {
  TimeSeries series;
  DensityMatrix final_state;
  IntegrationStats stats;
  double max_hermiticity_error = 0.0;
  double max_trace_drift = 0.0;
  // Smallest eigenvalue over all samples; NaN unless cfg.check_positivity.
  double min_eigenvalue = 0.0;
};

// Integrates the master equation from rho0 and samples observables at every
// grid point. t_grid must start at 0 and be strictly ascending. No trace
// renormalization is applied; drift beyond cfg.trace_tol throws
// kTraceDriftExceeded, and with cfg.check_positivity an eigenvalue below -1e-8
// throws kPositivityViolated.
EvolveResult Evolve(const DensityMatrix& rho0,
                    std::span<const JumpChannel> channels, KerrTerm kerr,
                    std::span<const double> t_grid,
                    const IntegratorConfig& cfg = {});

struct SpectrumProbe {
  // Smallest nonzero |Re lambda| over the whole generator.
  std::optional<double> slowest_rate;
  // Same, restricted to the population (k == l) sector.
  std::optional<double> slowest_population_rate;
};

// Slowest nonzero decay rates of the generator (nmax <= 60). Empty fields
// mean every eigenvalue has zero real part.
SpectrumProbe SuperoperatorSpectrumProbe(std::span<const JumpChannel> channels,
                                         KerrTerm kerr, FockCutoff cutoff);

// Full (dim^2 x dim^2) generator acting on column-stacked vec(rho), assembled
// with Kronecker products. Intended for small cutoffs and cross-checks.
Eigen::MatrixXcd SuperoperatorMatrix(std::span<const JumpChannel> channels,
                                     KerrTerm kerr, FockCutoff cutoff);

}  // namespace nlatten

#endif  // NLATTEN_DYNAMICS_H_
