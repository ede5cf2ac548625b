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

#ifndef NLATTEN_TIMESERIES_H_
#define NLATTEN_TIMESERIES_H_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "nlatten/fock.h"

namespace nlatten {

// Photon-number statistics of one state.
struct Observables {
  double mean_n = 0.0;
  double std_n = 0.0;
  // sum n(n-1) p_n / mean^2; defined as 0 when mean_n == 0.
  double g2 = 0.0;
  Eigen::VectorXd populations;
};

Observables ComputeObservables(const Eigen::VectorXd& populations);
Observables ComputeObservables(const DensityMatrix& rho);

// Sampled observables of one run. Row i of `populations` holds p_0..p_nmax at
// t[i].
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> mean_n;
  std::vector<double> std_n;
  std::vector<double> g2;
  std::vector<double> trace_err;
  Eigen::MatrixXd populations;

  TimeSeries() = default;
  TimeSeries(std::size_t samples, int levels);

  std::size_t size() const noexcept { return t.size(); }
  int levels() const noexcept { return static_cast<int>(populations.cols()); }

  void Set(std::size_t i, double time, const Eigen::VectorXd& p,
           double trace_error);

  Eigen::VectorXd PopulationsAt(std::size_t i) const {
    return populations.row(static_cast<Eigen::Index>(i)).transpose();
  }
  double Population(std::size_t i, int n) const {
    return populations(static_cast<Eigen::Index>(i), n);
  }
};

// Evenly spaced grid 0, t_max/(samples-1), ..., t_max (samples >= 2).
std::vector<double> UniformGrid(double t_max, std::size_t samples);

}  // namespace nlatten

#endif  // NLATTEN_TIMESERIES_H_
