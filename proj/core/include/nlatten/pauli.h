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

#ifndef NLATTEN_PAULI_H_
#define NLATTEN_PAULI_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nlatten/fock.h"
#include "nlatten/integrator.h"
#include "nlatten/timeseries.h"

namespace nlatten {

// Photon-number distribution p_0..p_nmax. The sum may fall short of 1 by the
// truncation deficit of the initial state.
class PopulationVector {
 public:
  // Requires p_n >= -1e-12 and sum <= 1 + 1e-12.
  static PopulationVector FromVector(Eigen::VectorXd p);
  static PopulationVector FromDensity(const DensityMatrix& rho);
  static PopulationVector Poisson(double mean, FockCutoff cutoff);
  static PopulationVector Fock(int n, FockCutoff cutoff);

  const Eigen::VectorXd& values() const noexcept { return p_; }
  FockCutoff cutoff() const { return FockCutoff(static_cast<int>(p_.size()) - 1); }
  double total() const { return p_.sum(); }

 private:
  explicit PopulationVector(Eigen::VectorXd p) : p_(std::move(p)) {}
  Eigen::VectorXd p_;
};

struct PopulationRate {
  // rate * |<n - shift| (a^dagger)^j a^k |n>|^2
  double loss_rate = 0.0;
  // Level n + shift whose decay feeds n (may exceed the cutoff).
  int source_level = 0;
  // loss rate of source_level for the same channel.
  double gain_coefficient = 0.0;
};

// Loss out of |n> and gain into it for one channel, from the falling
// factorials n!/(n-k)! * (n-k+j)!/(n-k)!.
PopulationRate PopulationRates(const JumpChannel& channel, int n);

// Birth-free cascade dp_n/dt = sum_c [r_c(n + s_c) p_{n+s_c} - r_c(n) p_n].
// Lower triangular, so SolveShifted is a back substitution.
class PopulationGenerator {
 public:
  PopulationGenerator(std::span<const JumpChannel> channels, FockCutoff cutoff);

  void Apply(const Eigen::VectorXd& p, Eigen::VectorXd& out) const;
  void SolveShifted(double hg, const Eigen::VectorXd& b, Eigen::VectorXd& z) const;

  // Total loss rate out of level n (also the eigenvalue -lambda_n).
  double TotalLoss(int n) const { return total_loss_[n]; }
  FockCutoff cutoff() const { return cutoff_; }

 private:
  struct Gain {
    int shift;
    std::vector<double> coefficient;  // coefficient[n] = r_c(n + shift), or 0
  };
  FockCutoff cutoff_;
  std::vector<double> total_loss_;
  std::vector<Gain> gains_;
};

struct PauliResult {
  TimeSeries series;
  Eigen::VectorXd final_populations;
  IntegrationStats stats;
  double max_sum_drift = 0.0;
};

// Integrates the population cascade. Same error contract as Evolve: t_grid
// starts at 0; |sum p(t) - sum p(0)| > cfg.trace_tol throws
// kTraceDriftExceeded.
PauliResult EvolvePopulations(const PopulationVector& p0,
                              std::span<const JumpChannel> channels,
                              std::span<const double> t_grid,
                              const IntegratorConfig& cfg = {});

// Elements rho_{k, k+d}, k = 0..nmax-d, of one density-matrix stripe.
struct StripeVector {
  int d = 0;
  Eigen::VectorXcd values;

  int nmax() const { return static_cast<int>(values.size()) + d - 1; }

  // Checks d >= 0, at least one element, and for d == 0 a real nonnegative
  // stripe within 1e-12.
  void Validate() const;
  static StripeVector FromDensity(const DensityMatrix& rho, int d);
};

// Stripe equation for the pure effective-nonlinear channel:
//   d rho_kl/dt = -(G/2)[k(k-1)^2 + l(l-1)^2] rho_kl
//                 + G sqrt(k^2 (k+1) l^2 (l+1)) rho_{k+1,l+1}.
class StripeGenerator {
 public:
  StripeGenerator(int d, int nmax, double gamma_e);

  void Apply(const Eigen::VectorXcd& s, Eigen::VectorXcd& out) const;
  void SolveShifted(double hg, const Eigen::VectorXcd& b, Eigen::VectorXcd& z) const;

  double Decay(int k) const { return decay_[k]; }
  double Feed(int k) const { return feed_[k]; }

 private:
  std::vector<double> decay_;  // positive decay rate of element k
  std::vector<double> feed_;   // coefficient of element k+1 in d/dt element k
};

struct StripeResult {
  std::vector<double> t;
  std::vector<StripeVector> samples;
  IntegrationStats stats;
};

// Evolves one stripe independently. Only the effective-nonlinear channel
// (j=1, k=2) may carry a nonzero rate; anything else throws
// kUnsupportedChannels (use the dense engine for mixed channels).
StripeResult EvolveStripe(const StripeVector& s0,
                          std::span<const JumpChannel> channels,
                          std::span<const double> t_grid,
                          const IntegratorConfig& cfg = {});

}  // namespace nlatten

#endif  // NLATTEN_PAULI_H_
