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

#include "nlatten/timeseries.h"

#include <algorithm>
#include <cmath>

#include "nlatten/error.h"

namespace nlatten {

Observables ComputeObservables(const Eigen::VectorXd& populations) {
  double m1 = 0.0, m2 = 0.0, fact2 = 0.0;
  for (Eigen::Index n = 0; n < populations.size(); ++n) {
    const double p = populations(n);
    const double dn = static_cast<double>(n);
    m1 += dn * p;
    m2 += dn * dn * p;
    fact2 += dn * (dn - 1.0) * p;
  }
  Observables obs;
  obs.mean_n = m1;
  obs.std_n = std::sqrt(std::max(0.0, m2 - m1 * m1));
  obs.g2 = m1 == 0.0 ? 0.0 : fact2 / (m1 * m1);
  obs.populations = populations;
  return obs;
}

Observables ComputeObservables(const DensityMatrix& rho) {
  return ComputeObservables(rho.populations());
}

TimeSeries::TimeSeries(std::size_t samples, int levels)
    : t(samples, 0.0),
      mean_n(samples, 0.0),
      std_n(samples, 0.0),
      g2(samples, 0.0),
      trace_err(samples, 0.0),
      populations(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(samples),
                                        levels)) {}

void TimeSeries::Set(std::size_t i, double time, const Eigen::VectorXd& p,
                     double trace_error) {
  const Observables obs = ComputeObservables(p);
  t[i] = time;
  mean_n[i] = obs.mean_n;
  std_n[i] = obs.std_n;
  g2[i] = obs.g2;
  trace_err[i] = trace_error;
  populations.row(static_cast<Eigen::Index>(i)) = p.transpose();
}

std::vector<double> UniformGrid(double t_max, std::size_t samples) {
  if (samples < 2 || !(t_max > 0.0) || !std::isfinite(t_max)) {
    throw Error(ErrorKind::kInvalidArgument,
                "uniform grid needs t_max > 0 and at least 2 samples");
  }
  std::vector<double> grid(samples);
  const double dt = t_max / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) grid[i] = dt * static_cast<double>(i);
  grid.back() = t_max;
  return grid;
}

}  // namespace nlatten
