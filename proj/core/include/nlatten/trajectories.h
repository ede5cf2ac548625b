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

#ifndef NLATTEN_TRAJECTORIES_H_
#define NLATTEN_TRAJECTORIES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nlatten/dynamics.h"
#include "nlatten/fock.h"
#include "nlatten/timeseries.h"

namespace nlatten {

struct TrajectoryConfig {
  std::size_t n_traj = 10000;
  std::uint64_t master_seed = 0;
  // Bracketing stride used before bisecting for a jump time.
  double dt_max = 1.0;
  // Sampling times; must start at 0 and be strictly ascending.
  std::vector<double> grid;
  // 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  // Bisection tolerance on jump times.
  double jump_time_tol = 1e-10;
};

struct EnsembleResult {
  std::vector<double> t;
  // samples x levels
  Eigen::MatrixXd mean;
  Eigen::MatrixXd standard_error;
  std::size_t n_traj = 0;
  std::uint64_t total_jumps = 0;

  // Observables of the mean populations.
  TimeSeries Series() const;
};

// Deterministic per-trajectory seed for (master_seed, index). Depends on
// nothing else, so results are independent of scheduling.
std::uint64_t TrajectorySeed(std::uint64_t master_seed, std::uint64_t index);

// Quantum-jump unraveling of the master equation. Every jump operator here
// maps Fock states to Fock states, so the no-jump propagator is diagonal and
// is applied in closed form; waiting times are found by bisection on the
// squared norm against a uniform draw.
EnsembleResult RunEnsemble(const PureState& psi0,
                           std::span<const JumpChannel> channels, KerrTerm kerr,
                           const TrajectoryConfig& cfg);

}  // namespace nlatten

#endif  // NLATTEN_TRAJECTORIES_H_
