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

#include "nlatten/dynamics.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "nlatten/error.h"

namespace nlatten {
namespace {

Eigen::MatrixXcd Kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::MatrixXcd KerrHamiltonian(KerrTerm kerr, FockCutoff cutoff) {
  const Eigen::MatrixXcd a = AnnihilationMatrix(cutoff);
  const Eigen::MatrixXcd ad = a.adjoint();
  return kerr.u1 * (ad * ad * a * a);
}

}  // namespace

Liouvillian::Liouvillian(std::span<const JumpChannel> channels, KerrTerm kerr,
                         FockCutoff cutoff)
    : cutoff_(cutoff) {
  if (!std::isfinite(kerr.u1)) {
    throw Error(ErrorKind::kInvalidArgument, "Kerr strength must be finite");
  }
  const int dim = cutoff.dim();
  for (const JumpChannel& c : channels) {
    c.Validate();
    if (c.rate == 0.0) continue;
    const Eigen::MatrixXcd l = JumpMatrix(c, cutoff);
    Feed feed{c.lowering(), c.rate, std::vector<double>(dim, 0.0)};
    for (int n = feed.shift; n < dim; ++n) {
      feed.amplitude[n] = l(n - feed.shift, n).real();
    }
    feeds_.push_back(std::move(feed));
  }

  std::vector<double> loss(dim, 0.0);
  for (const Feed& f : feeds_) {
    for (int n = 0; n < dim; ++n) loss[n] += f.rate * f.amplitude[n] * f.amplitude[n];
  }
  // Fold sqrt(rate) into the amplitudes: the feed coefficient into (k, l) is
  // then amplitude[k + s] * amplitude[l + s].
  for (Feed& f : feeds_) {
    const double s = std::sqrt(f.rate);
    for (double& a : f.amplitude) a *= s;
  }
  diag_.resize(dim, dim);
  for (int l = 0; l < dim; ++l) {
    for (int k = 0; k < dim; ++k) {
      const double energy = kerr.u1 * (double(k) * (k - 1) - double(l) * (l - 1));
      diag_(k, l) = Complex(-0.5 * (loss[k] + loss[l]), -energy);
    }
  }
}

void Liouvillian::Apply(const Eigen::MatrixXcd& rho,
                        Eigen::MatrixXcd& out) const {
  const int dim = cutoff_.dim();
  if (rho.rows() != dim || rho.cols() != dim) {
    throw Error(ErrorKind::kDimensionMismatch, "state does not match cutoff");
  }
  out.resize(dim, dim);
  for (int l = 0; l < dim; ++l) {
    for (int k = 0; k < dim; ++k) {
      Complex v = diag_(k, l) * rho(k, l);
      for (const Feed& f : feeds_) {
        const int kk = k + f.shift;
        const int ll = l + f.shift;
        if (kk < dim && ll < dim) {
          v += (f.amplitude[kk] * f.amplitude[ll]) * rho(kk, ll);
        }
      }
      out(k, l) = v;
    }
  }
}

void Liouvillian::SolveShifted(double hg, const Eigen::MatrixXcd& b,
                               Eigen::MatrixXcd& z) const {
  const int dim = cutoff_.dim();
  z.resize(dim, dim);
  for (int l = dim - 1; l >= 0; --l) {
    for (int k = dim - 1; k >= 0; --k) {
      Complex v = b(k, l);
      for (const Feed& f : feeds_) {
        const int kk = k + f.shift;
        const int ll = l + f.shift;
        if (kk < dim && ll < dim) {
          v += (hg * f.amplitude[kk] * f.amplitude[ll]) * z(kk, ll);
        }
      }
      z(k, l) = v / (1.0 - hg * diag_(k, l));
    }
  }
}

void Liouvillian::PostStep(Eigen::MatrixXcd& rho) const {
  const Eigen::MatrixXcd sym = 0.5 * (rho + rho.adjoint());
  rho = sym;
}

Eigen::MatrixXcd LindbladRhs(const Eigen::MatrixXcd& rho,
                             std::span<const JumpChannel> channels,
                             KerrTerm kerr) {
  if (rho.rows() != rho.cols() || rho.rows() < 2) {
    throw Error(ErrorKind::kDimensionMismatch,
                "density matrix must be square with dimension >= 2");
  }
  const FockCutoff cutoff(static_cast<int>(rho.rows()) - 1);
  const Eigen::MatrixXcd h = KerrHamiltonian(kerr, cutoff);
  const Complex i(0.0, 1.0);
  Eigen::MatrixXcd out = -i * (h * rho - rho * h);
  for (const JumpChannel& c : channels) {
    c.Validate();
    if (c.rate == 0.0) continue;
    const Eigen::MatrixXcd l = JumpMatrix(c, cutoff);
    const Eigen::MatrixXcd ldl = l.adjoint() * l;
    out += c.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

EvolveResult Evolve(const DensityMatrix& rho0,
                    std::span<const JumpChannel> channels, KerrTerm kerr,
                    std::span<const double> t_grid,
                    const IntegratorConfig& cfg) {
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "time grid must start at t=0");
  }
  const Liouvillian generator(channels, kerr, rho0.cutoff());
  Eigen::MatrixXcd y = rho0.matrix();
  const double trace0 = y.trace().real();

  EvolveResult result{TimeSeries(t_grid.size(), rho0.dim()), rho0, {}, 0.0, 0.0,
                      cfg.check_positivity
                          ? std::numeric_limits<double>::infinity()
                          : std::numeric_limits<double>::quiet_NaN()};
  auto observe = [&](std::size_t i, double t, const Eigen::MatrixXcd& rho) {
    const double drift = std::abs(rho.trace().real() - trace0);
    if (!(drift <= cfg.trace_tol)) {
      std::ostringstream os;
      os << "trace drift " << drift << " at t=" << t << " exceeds "
         << cfg.trace_tol;
      throw Error(ErrorKind::kTraceDriftExceeded, os.str());
    }
    result.max_trace_drift = std::max(result.max_trace_drift, drift);
    result.max_hermiticity_error =
        std::max(result.max_hermiticity_error, HermiticityError(rho));
    if (cfg.check_positivity) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
          rho, Eigen::EigenvaluesOnly);
      const double lo = solver.eigenvalues().minCoeff();
      if (lo < -1e-8) {
        std::ostringstream os;
        os << "density matrix eigenvalue " << lo << " at t=" << t;
        throw Error(ErrorKind::kPositivityViolated, os.str());
      }
      result.min_eigenvalue = std::min(result.min_eigenvalue, lo);
    }
    result.series.Set(i, t, rho.diagonal().real(), drift);
  };
  result.stats = Integrate(generator, y, t_grid, cfg, observe);
  result.final_state =
      DensityMatrix::FromMatrix(std::move(y), std::abs(trace0 - 1.0) + cfg.trace_tol);
  return result;
}

SpectrumProbe SuperoperatorSpectrumProbe(std::span<const JumpChannel> channels,
                                         KerrTerm kerr, FockCutoff cutoff) {
  if (cutoff.nmax() > 60) {
    throw Error(ErrorKind::kInvalidArgument,
                "spectrum probe supports nmax <= 60");
  }
  // The generator is triangular in the element basis, so its eigenvalues are
  // exactly the diagonal couplings.
  const Liouvillian generator(channels, kerr, cutoff);
  constexpr double kZero = 1e-12;
  SpectrumProbe probe;
  for (int l = 0; l < cutoff.dim(); ++l) {
    for (int k = 0; k < cutoff.dim(); ++k) {
      const double rate = -generator.Diagonal(k, l).real();
      if (std::abs(rate) <= kZero) continue;
      if (!probe.slowest_rate || rate < *probe.slowest_rate) probe.slowest_rate = rate;
      if (k == l && (!probe.slowest_population_rate ||
                     rate < *probe.slowest_population_rate)) {
        probe.slowest_population_rate = rate;
      }
    }
  }
  return probe;
}

Eigen::MatrixXcd SuperoperatorMatrix(std::span<const JumpChannel> channels,
                                     KerrTerm kerr, FockCutoff cutoff) {
  if (cutoff.nmax() > 20) {
    throw Error(ErrorKind::kInvalidArgument,
                "explicit superoperator limited to nmax <= 20");
  }
  const int dim = cutoff.dim();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd h = KerrHamiltonian(kerr, cutoff);
  const Complex i(0.0, 1.0);
  Eigen::MatrixXcd s = -i * (Kron(id, h) - Kron(h.transpose(), id));
  for (const JumpChannel& c : channels) {
    c.Validate();
    if (c.rate == 0.0) continue;
    const Eigen::MatrixXcd l = JumpMatrix(c, cutoff);
    const Eigen::MatrixXcd ldl = l.adjoint() * l;
    s += c.rate * (Kron(l.conjugate(), l) - 0.5 * Kron(id, ldl) -
                   0.5 * Kron(ldl.transpose(), id));
  }
  return s;
}

}  // namespace nlatten
