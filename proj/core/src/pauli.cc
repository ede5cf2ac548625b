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

#include "nlatten/pauli.h"

#include <cmath>
#include <sstream>

#include "nlatten/error.h"

namespace nlatten {
namespace {

// |<n - (k - j)| (a^dagger)^j a^k |n>|^2 without any matrix algebra.
double SquaredMatrixElement(const JumpChannel& c, int n) {
  if (n < c.k) return 0.0;
  double v = 1.0;
  for (int i = 0; i < c.k; ++i) v *= double(n - i);
  for (int i = 1; i <= c.j; ++i) v *= double(n - c.k + i);
  return v;
}

void CheckGrid(std::span<const double> t_grid) {
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "time grid must start at t=0");
  }
}

}  // namespace

PopulationVector PopulationVector::FromVector(Eigen::VectorXd p) {
  if (p.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "population vector needs >= 2 levels");
  }
  if (!p.allFinite() || p.minCoeff() < -1e-12) {
    throw Error(ErrorKind::kInvalidArgument, "populations must be finite and >= -1e-12");
  }
  if (p.sum() > 1.0 + 1e-12) {
    throw Error(ErrorKind::kInvalidArgument, "populations sum above 1");
  }
  return PopulationVector(std::move(p));
}

PopulationVector PopulationVector::FromDensity(const DensityMatrix& rho) {
  return FromVector(rho.populations());
}

PopulationVector PopulationVector::Poisson(double mean, FockCutoff cutoff) {
  if (!(mean >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "Poisson mean must be >= 0");
  }
  const Eigen::VectorXcd c = CoherentAmplitudes(Complex(std::sqrt(mean), 0.0), cutoff);
  return FromVector(c.cwiseAbs2());
}

PopulationVector PopulationVector::Fock(int n, FockCutoff cutoff) {
  if (n < 0 || n > cutoff.nmax()) {
    throw Error(ErrorKind::kInvalidArgument, "Fock level outside cutoff");
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(cutoff.dim());
  p(n) = 1.0;
  return PopulationVector(std::move(p));
}

PopulationRate PopulationRates(const JumpChannel& channel, int n) {
  channel.Validate();
  if (n < 0) {
    throw Error(ErrorKind::kInvalidArgument, "negative Fock level");
  }
  PopulationRate r;
  r.loss_rate = channel.rate * SquaredMatrixElement(channel, n);
  r.source_level = n + channel.lowering();
  r.gain_coefficient = channel.rate * SquaredMatrixElement(channel, r.source_level);
  return r;
}

PopulationGenerator::PopulationGenerator(std::span<const JumpChannel> channels,
                                         FockCutoff cutoff)
    : cutoff_(cutoff), total_loss_(cutoff.dim(), 0.0) {
  const int dim = cutoff.dim();
  for (const JumpChannel& c : channels) {
    c.Validate();
    if (c.rate == 0.0) continue;
    if (c.k > cutoff.nmax()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "channel a^" + std::to_string(c.k) + " exceeds the cutoff");
    }
    Gain gain{c.lowering(), std::vector<double>(dim, 0.0)};
    for (int n = 0; n < dim; ++n) {
      const PopulationRate r = PopulationRates(c, n);
      total_loss_[n] += r.loss_rate;
      if (r.source_level < dim) gain.coefficient[n] = r.gain_coefficient;
    }
    gains_.push_back(std::move(gain));
  }
}

void PopulationGenerator::Apply(const Eigen::VectorXd& p,
                                Eigen::VectorXd& out) const {
  const int dim = cutoff_.dim();
  if (p.size() != dim) {
    throw Error(ErrorKind::kDimensionMismatch, "population vector does not match cutoff");
  }
  out.resize(dim);
  for (int n = 0; n < dim; ++n) {
    double v = -total_loss_[n] * p(n);
    for (const Gain& g : gains_) {
      if (n + g.shift < dim) v += g.coefficient[n] * p(n + g.shift);
    }
    out(n) = v;
  }
}

void PopulationGenerator::SolveShifted(double hg, const Eigen::VectorXd& b,
                                       Eigen::VectorXd& z) const {
  const int dim = cutoff_.dim();
  z.resize(dim);
  for (int n = dim - 1; n >= 0; --n) {
    double v = b(n);
    for (const Gain& g : gains_) {
      if (n + g.shift < dim) v += hg * g.coefficient[n] * z(n + g.shift);
    }
    z(n) = v / (1.0 + hg * total_loss_[n]);
  }
}

PauliResult EvolvePopulations(const PopulationVector& p0,
                              std::span<const JumpChannel> channels,
                              std::span<const double> t_grid,
                              const IntegratorConfig& cfg) {
  CheckGrid(t_grid);
  const PopulationGenerator generator(channels, p0.cutoff());
  Eigen::VectorXd y = p0.values();
  const double sum0 = y.sum();
  PauliResult result{TimeSeries(t_grid.size(), p0.cutoff().dim()), {}, {}, 0.0};
  auto observe = [&](std::size_t i, double t, const Eigen::VectorXd& p) {
    const double drift = std::abs(p.sum() - sum0);
    if (!(drift <= cfg.trace_tol)) {
      std::ostringstream os;
      os << "probability drift " << drift << " at t=" << t << " exceeds "
         << cfg.trace_tol;
      throw Error(ErrorKind::kTraceDriftExceeded, os.str());
    }
    result.max_sum_drift = std::max(result.max_sum_drift, drift);
    result.series.Set(i, t, p, drift);
  };
  result.stats = Integrate(generator, y, t_grid, cfg, observe);
  result.final_populations = std::move(y);
  return result;
}

void StripeVector::Validate() const {
  if (d < 0 || values.size() < 1) {
    throw Error(ErrorKind::kInvalidArgument, "stripe needs d >= 0 and >= 1 element");
  }
  if (d == 0) {
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      if (std::abs(values(k).imag()) > 1e-12 || values(k).real() < -1e-12) {
        throw Error(ErrorKind::kInvalidArgument,
                    "diagonal stripe must be real and nonnegative");
      }
    }
  }
}

StripeVector StripeVector::FromDensity(const DensityMatrix& rho, int d) {
  const int nmax = rho.dim() - 1;
  if (d < 0 || d > nmax) {
    throw Error(ErrorKind::kInvalidArgument, "stripe offset outside the matrix");
  }
  StripeVector s{d, Eigen::VectorXcd(nmax + 1 - d)};
  for (int k = 0; k + d <= nmax; ++k) s.values(k) = rho.matrix()(k, k + d);
  return s;
}

StripeGenerator::StripeGenerator(int d, int nmax, double gamma_e) {
  const int m = nmax + 1 - d;
  if (d < 0 || m < 1) {
    throw Error(ErrorKind::kInvalidArgument, "stripe offset outside the matrix");
  }
  decay_.assign(m, 0.0);
  feed_.assign(m, 0.0);
  for (int k = 0; k < m; ++k) {
    const double kk = k;
    const double ll = k + d;
    decay_[k] = 0.5 * gamma_e * (kk * (kk - 1) * (kk - 1) + ll * (ll - 1) * (ll - 1));
    if (k + 1 < m) {
      feed_[k] = gamma_e * std::sqrt(kk * kk * (kk + 1) * ll * ll * (ll + 1));
    }
  }
}

void StripeGenerator::Apply(const Eigen::VectorXcd& s,
                            Eigen::VectorXcd& out) const {
  const Eigen::Index m = static_cast<Eigen::Index>(decay_.size());
  if (s.size() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "stripe length mismatch");
  }
  out.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    Complex v = -decay_[k] * s(k);
    if (k + 1 < m) v += feed_[k] * s(k + 1);
    out(k) = v;
  }
}

void StripeGenerator::SolveShifted(double hg, const Eigen::VectorXcd& b,
                                   Eigen::VectorXcd& z) const {
  const Eigen::Index m = static_cast<Eigen::Index>(decay_.size());
  z.resize(m);
  for (Eigen::Index k = m - 1; k >= 0; --k) {
    Complex v = b(k);
    if (k + 1 < m) v += (hg * feed_[k]) * z(k + 1);
    z(k) = v / (1.0 + hg * decay_[k]);
  }
}

StripeResult EvolveStripe(const StripeVector& s0,
                          std::span<const JumpChannel> channels,
                          std::span<const double> t_grid,
                          const IntegratorConfig& cfg) {
  s0.Validate();
  CheckGrid(t_grid);
  double gamma_e = 0.0;
  for (const JumpChannel& c : channels) {
    c.Validate();
    if (c.rate == 0.0) continue;
    if (c.j != 1 || c.k != 2) {
      std::ostringstream os;
      os << "stripe evolution covers only the a^dagger a a channel; got "
         << "(a^dagger)^" << c.j << " a^" << c.k;
      throw Error(ErrorKind::kUnsupportedChannels, os.str());
    }
    gamma_e += c.rate;
  }
  const StripeGenerator generator(s0.d, s0.nmax(), gamma_e);
  Eigen::VectorXcd y = s0.values;
  StripeResult result;
  result.t.assign(t_grid.begin(), t_grid.end());
  result.samples.resize(t_grid.size());
  auto observe = [&](std::size_t i, double, const Eigen::VectorXcd& s) {
    result.samples[i] = StripeVector{s0.d, s};
  };
  result.stats = Integrate(generator, y, t_grid, cfg, observe);
  return result;
}

}  // namespace nlatten
